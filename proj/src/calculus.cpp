#include "pom/calculus.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace pom {

// ------------------------------------------------------------------
// context basics
// ------------------------------------------------------------------

std::vector<VarId> ctx_dom(const OpenContext& O) {
    std::vector<VarId> out;
    out.reserve(O.size());
    for (const auto& e : O) out.push_back(e.binder);
    return out;
}

const Bite* ctx_lookup(const OpenContext& O, VarId y) {
    // First binder outward from the hole = lowest sequence index.
    for (const auto& e : O)
        if (e.binder == y) return e.bite;
    return nullptr;
}

const PositiveTerm* plug(TermArena& arena, const OpenContext& O, const PositiveTerm* t) {
    const PositiveTerm* out = t;
    for (const auto& e : O) out = arena.es(out, e.binder, e.bite);
    return out;
}

std::vector<VarId> afv(const OpenContext& O) {
    std::unordered_set<VarId> s;
    for (const auto& e : O) {
        s.erase(e.binder);
        if (e.bite->kind == Bite::Kind::VarApp) s.insert(e.bite->u);
    }
    std::vector<VarId> out(s.begin(), s.end());
    std::sort(out.begin(), out.end());
    return out;
}

// ------------------------------------------------------------------
// right contexts
// ------------------------------------------------------------------

namespace {

// Hole-to-root fold with a bitmask afv; valid only while every id touched is
// < 64. Returns nullopt when an id falls outside the mask range.
std::optional<bool> right_oi_mask(const OpenContext& O) {
    std::uint64_t s = 0;
    for (const auto& e : O) {
        switch (e.bite->kind) {
            case Bite::Kind::RedexApp:
                return false;
            case Bite::Kind::Abs:
                // binder not in s, so the s \ {binder} update is a no-op
                if (e.binder >= 64) return std::nullopt;
                if (s & (1ull << e.binder)) return false;
                break;
            case Bite::Kind::VarApp:
                if (e.binder >= 64 || e.bite->u >= 64) return std::nullopt;
                s &= ~(1ull << e.binder);
                s |= 1ull << e.bite->u;
                break;
        }
    }
    return true;
}

bool right_oi_set(const OpenContext& O) {
    std::unordered_set<VarId> s;
    for (const auto& e : O) {
        switch (e.bite->kind) {
            case Bite::Kind::RedexApp:
                return false;
            case Bite::Kind::Abs:
                if (s.count(e.binder)) return false;
                break;
            case Bite::Kind::VarApp:
                s.erase(e.binder);
                s.insert(e.bite->u);
                break;
        }
    }
    return true;
}

std::optional<bool> right_io_mask(const OpenContext& O) {
    std::uint64_t bound = 0, abs = 0;
    for (std::size_t i = O.size(); i-- > 0;) {  // root toward hole
        const auto& e = O[i];
        if (e.binder >= 64) return std::nullopt;
        std::uint64_t bbit = 1ull << e.binder;
        switch (e.bite->kind) {
            case Bite::Kind::RedexApp:
                return false;
            case Bite::Kind::Abs:
                bound |= bbit;
                abs |= bbit;
                break;
            case Bite::Kind::VarApp: {
                if (e.bite->u >= 64) return std::nullopt;
                std::uint64_t ybit = 1ull << e.bite->u;
                if ((bound & ybit) && (abs & ybit)) return false;
                bound |= bbit;
                abs &= ~bbit;
                break;
            }
        }
    }
    return true;
}

bool right_io_map(const OpenContext& O) {
    std::unordered_map<VarId, bool> is_abs;  // innermost-wins binder map
    for (std::size_t i = O.size(); i-- > 0;) {
        const auto& e = O[i];
        switch (e.bite->kind) {
            case Bite::Kind::RedexApp:
                return false;
            case Bite::Kind::Abs:
                is_abs[e.binder] = true;
                break;
            case Bite::Kind::VarApp: {
                auto it = is_abs.find(e.bite->u);
                if (it != is_abs.end() && it->second) return false;
                is_abs[e.binder] = false;
                break;
            }
        }
    }
    return true;
}

}  // namespace

bool is_right_oi(const OpenContext& O) {
    if (auto fast = right_oi_mask(O)) return *fast;
    return right_oi_set(O);
}

bool is_right_io(const OpenContext& O) {
    if (auto fast = right_io_mask(O)) return *fast;
    return right_io_map(O);
}

std::pair<OpenContext, VarId> head_split(const PositiveTerm* t) {
    // Walk root-to-hole collecting spine nodes, then emit in sequence order.
    std::vector<const PositiveTerm*> nodes;
    while (t->kind == PositiveTerm::Kind::ES) {
        nodes.push_back(t);
        t = t->body;
    }
    OpenContext O;
    for (std::size_t i = nodes.size(); i-- > 0;) O.append_root(nodes[i]->var, nodes[i]->bite);
    return {std::move(O), t->var};
}

// ------------------------------------------------------------------
// redex enumeration and root rules
// ------------------------------------------------------------------

namespace {

// Spine nodes in root-to-hole order (nodes[0] is the term's root ES) plus the
// head variable. Sequence index of nodes[i] is n-1-i.
struct Spine {
    std::vector<const PositiveTerm*> nodes;
    VarId head = 0;

    std::size_t seq(std::size_t node_idx) const { return nodes.size() - 1 - node_idx; }
    const PositiveTerm* at_seq(std::size_t seq_idx) const {
        return nodes[nodes.size() - 1 - seq_idx];
    }
};

Spine spine_of(const PositiveTerm* t) {
    Spine s;
    while (t->kind == PositiveTerm::Kind::ES) {
        s.nodes.push_back(t);
        t = t->body;
    }
    s.head = t->var;
    return s;
}

// Entries strictly outside sequence index `pos`.
OpenContext position_of(const Spine& s, std::size_t pos) {
    OpenContext O;
    for (std::size_t seq = pos + 1; seq < s.nodes.size(); ++seq) {
        const PositiveTerm* n = s.at_seq(seq);
        O.append_root(n->var, n->bite);
    }
    return O;
}

// Rebuild the spine around `inner`, replacing everything at sequence indices
// <= pos by `inner` (i.e. re-wrap the entries outside pos).
const PositiveTerm* rewrap_outside(TermArena& arena, const Spine& s, std::size_t pos,
                                   const PositiveTerm* inner) {
    const PositiveTerm* out = inner;
    for (std::size_t seq = pos + 1; seq < s.nodes.size(); ++seq) {
        const PositiveTerm* n = s.at_seq(seq);
        out = arena.es(out, n->var, n->bite);
    }
    return out;
}

struct RawRedex {
    Label label;
    std::size_t pos;      // sequence index of the fired entry
    std::size_t abs_pos;  // e only
};

// Root-to-hole scan reporting each redex shape to `hit`; stops early when it
// returns true. The binder map is innermost-wins (inner entries overwrite).
template <class Hit>
void scan_redexes(const Spine& s, Hit&& hit) {
    struct BinderInfo {
        std::size_t seq;
        Bite::Kind kind;
    };
    std::unordered_map<VarId, BinderInfo> binders;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const Bite* b = s.nodes[i]->bite;
        std::size_t seq = s.seq(i);
        switch (b->kind) {
            case Bite::Kind::RedexApp:
                if (hit(RawRedex{Label::m, seq, 0})) return;
                break;
            case Bite::Kind::VarApp: {
                auto it = binders.find(b->u);
                if (it != binders.end() && it->second.kind == Bite::Kind::Abs)
                    if (hit(RawRedex{Label::e, seq, it->second.seq})) return;
                break;
            }
            case Bite::Kind::Abs:
                break;
        }
        binders[s.nodes[i]->var] = {seq, b->kind};
    }
}

// Whole-term reduct of firing the redex shape at `raw` in spine `s`.
const PositiveTerm* fire(TermArena& arena, const Spine& s, const RawRedex& raw,
                         NameSupply& supply) {
    const PositiveTerm* node = s.at_seq(raw.pos);
    if (raw.label == Label::m) {
        const PositiveTerm* sub = root_m(arena, node->body, node->var, node->bite, &supply);
        return rewrap_outside(arena, s, raw.pos, sub);
    }
    const PositiveTerm* abs_node = s.at_seq(raw.abs_pos);
    const Bite* copy = alpha_copy(arena, abs_node->bite, supply);
    const Bite* nb = arena.redex_app(copy->u, copy->body, node->bite->v);
    const PositiveTerm* inner = arena.es(node->body, node->var, nb);
    return rewrap_outside(arena, s, raw.pos, inner);
}

Redex materialize(TermArena& arena, const Spine& s, const RawRedex& raw, NameSupply& supply) {
    Redex r;
    r.label = raw.label;
    r.pos = raw.pos;
    r.abs_pos = raw.abs_pos;
    r.abs_bite = raw.label == Label::e ? s.at_seq(raw.abs_pos)->bite : nullptr;
    r.position = position_of(s, raw.pos);
    r.reduct = fire(arena, s, raw, supply);
    return r;
}

}  // namespace

std::vector<Redex> enumerate_redexes(TermArena& arena, const PositiveTerm* t,
                                     NameSupply& supply) {
    Spine s = spine_of(t);
    std::vector<RawRedex> raws;
    scan_redexes(s, [&](const RawRedex& r) {
        raws.push_back(r);
        return false;
    });
    std::vector<Redex> out;
    out.reserve(raws.size());
    for (std::size_t i = raws.size(); i-- > 0;)  // ascending pos = innermost first
        out.push_back(materialize(arena, s, raws[i], supply));
    return out;
}

bool is_normal(const PositiveTerm* t) {
    bool found = false;
    scan_redexes(spine_of(t), [&](const RawRedex&) {
        found = true;
        return true;
    });
    return !found;
}

const PositiveTerm* root_m(TermArena& arena, const PositiveTerm* t, VarId x, const Bite* abs,
                           NameSupply* supply) {
    if (abs->kind != Bite::Kind::RedexApp)
        throw std::invalid_argument("root_m: bite is not a redex application");
    auto [O, w] = head_split(abs->body);  // abstraction body = O<w>
    const PositiveTerm* renamed = subst_var(arena, t, x, w, supply);
    const PositiveTerm* plugged = plug(arena, O, renamed);
    return subst_var(arena, plugged, abs->u, abs->v, supply);
}

const PositiveTerm* root_e(TermArena& arena, const PositiveTerm* t, const OpenContext& O,
                           VarId x, VarId y, VarId z, const Bite* abs, NameSupply& supply) {
    if (abs->kind != Bite::Kind::Abs)
        throw std::invalid_argument("root_e: bite is not an abstraction");
    for (const auto& e : O)
        if (e.binder == y)
            throw std::invalid_argument("root_e: y is rebound inside O");
    const Bite* copy = alpha_copy(arena, abs, supply);
    const Bite* nb = arena.redex_app(copy->u, copy->body, z);
    const PositiveTerm* inner = arena.es(t, x, nb);
    return arena.es(plug(arena, O, inner), y, abs);
}

// ------------------------------------------------------------------
// right strategy
// ------------------------------------------------------------------

std::optional<Redex> right_redex(TermArena& arena, const PositiveTerm* t, NameSupply& supply) {
    Spine s = spine_of(t);
    std::optional<RawRedex> found;
    scan_redexes(s, [&](const RawRedex& r) {
        found = r;
        return true;  // first hit walking root-to-hole is the right redex
    });
    if (!found) return std::nullopt;
    return materialize(arena, s, *found, supply);
}

std::optional<RightStep> right_step(TermArena& arena, const PositiveTerm* t,
                                    NameSupply& supply) {
    std::optional<Redex> r = right_redex(arena, t, supply);
    if (!r) return std::nullopt;
    const PositiveTerm* reduct = r->reduct;
    Label label = r->label;
    return RightStep{label, reduct, std::move(*r)};
}

RightEvalResult right_eval(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                           std::size_t budget) {
    RightEvalResult res;
    res.term = t;
    for (std::size_t i = 0; i < budget; ++i) {
        std::optional<RightStep> step = right_step(arena, res.term, supply);
        if (!step) {
            res.normal = true;
            return res;
        }
        if (step->label == Label::m) ++res.m_count;
        else ++res.e_count;
        res.steps.emplace_back(step->label, step->term);
        res.term = step->term;
    }
    res.normal = is_normal(res.term);
    return res;
}

}  // namespace pom
