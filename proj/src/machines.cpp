#include "pom/machines.hpp"

#include <type_traits>
#include <unordered_set>
#include <utility>

namespace pom {

namespace {

// Collect every binder occurring in a component (ES binders and the binders
// of abstraction/redex bites, recursively).
void collect_binders(const PositiveTerm* t, std::vector<VarId>& out);

void collect_binders(const Bite* b, std::vector<VarId>& out) {
    switch (b->kind) {
        case Bite::Kind::VarApp:
            return;
        case Bite::Kind::Abs:
        case Bite::Kind::RedexApp:
            out.push_back(b->u);
            collect_binders(b->body, out);
            return;
    }
}

void collect_binders(const PositiveTerm* t, std::vector<VarId>& out) {
    while (t->kind == PositiveTerm::Kind::ES) {
        out.push_back(t->var);
        collect_binders(t->bite, out);
        t = t->body;
    }
}

}  // namespace

// ------------------------------------------------------------------
// Natural machine
// ------------------------------------------------------------------

NaturalState natural_init(TermArena& arena, const PositiveTerm* t, NameSupply& supply) {
    NaturalState s;
    s.active = alpha_copy(arena, t, supply);
    return s;
}

std::optional<Label> natural_peek(const NaturalState& s) {
    const PositiveTerm* a = s.active;
    if (a->kind == PositiveTerm::Kind::Var) return std::nullopt;  // final
    switch (a->bite->kind) {
        case Bite::Kind::Abs:
            return Label::sea1;
        case Bite::Kind::RedexApp:
            return Label::m;
        case Bite::Kind::VarApp: {
            const Bite* def = ctx_lookup(s.rctx, a->bite->u);
            return (def != nullptr && def->kind == Bite::Kind::Abs) ? Label::e : Label::sea2;
        }
    }
    return std::nullopt;  // unreachable
}

std::optional<StepInfo> natural_step(TermArena& arena, NaturalState& s, NameSupply& supply) {
    std::optional<Label> l = natural_peek(s);
    if (!l) return std::nullopt;
    const PositiveTerm* a = s.active;
    switch (*l) {
        case Label::sea1:
        case Label::sea2:
            s.rctx.push_innermost(a->var, a->bite);
            s.active = a->body;
            return StepInfo{*l, 1};
        case Label::e: {
            const Bite* def = ctx_lookup(s.rctx, a->bite->u);
            const Bite* copy = alpha_copy(arena, def, supply);
            const Bite* nb = arena.redex_app(copy->u, copy->body, a->bite->v);
            s.active = arena.es(a->body, a->var, nb);
            return StepInfo{Label::e, copy->size};
        }
        case Label::m: {
            // Both renaming scopes are scanned: the inner term and the split
            // abstraction body.
            std::size_t cost = a->body->size + a->bite->body->size;
            s.active = root_m(arena, a->body, a->var, a->bite, &supply);
            return StepInfo{Label::m, cost};
        }
        default:
            return std::nullopt;  // unreachable: sea3 never applies here
    }
}

const PositiveTerm* natural_read_back(TermArena& arena, const NaturalState& s) {
    return plug(arena, s.rctx, s.active);
}

// ------------------------------------------------------------------
// Sliced machine
// ------------------------------------------------------------------

SlicedState sliced_init(TermArena& arena, const PositiveTerm* t, NameSupply& supply) {
    SlicedState s;
    s.active = alpha_copy(arena, t, supply);
    return s;
}

std::optional<Label> sliced_peek(const SlicedState& s) {
    const PositiveTerm* a = s.active;
    if (a->kind == PositiveTerm::Kind::Var) {
        return s.stack.empty() ? std::nullopt : std::optional<Label>(Label::sea3);
    }
    switch (a->bite->kind) {
        case Bite::Kind::Abs:
            return Label::sea1;
        case Bite::Kind::RedexApp:
            return Label::m;
        case Bite::Kind::VarApp: {
            const Bite* def = s.env.lookup(a->bite->u);
            return (def != nullptr && def->kind == Bite::Kind::Abs) ? Label::e : Label::sea2;
        }
    }
    return std::nullopt;  // unreachable
}

std::optional<StepInfo> sliced_step(TermArena& arena, SlicedState& s, NameSupply& supply) {
    std::optional<Label> l = sliced_peek(s);
    if (!l) return std::nullopt;
    const PositiveTerm* a = s.active;
    switch (*l) {
        case Label::sea1:
        case Label::sea2:
            s.env.push(a->var, a->bite);
            s.active = a->body;
            return StepInfo{*l, 1};
        case Label::e: {
            const Bite* def = s.env.lookup(a->bite->u);
            const Bite* copy = alpha_copy(arena, def, supply);
            const Bite* nb = arena.redex_app(copy->u, copy->body, a->bite->v);
            s.active = arena.es(a->body, a->var, nb);
            return StepInfo{Label::e, copy->size};
        }
        case Label::m: {
            // No head split and no copy: park the outer part as a slice and
            // move into the body, renaming its binder occurrences only.
            const Bite* bite = a->bite;
            std::size_t cost = bite->body->size;
            s.stack.push_back({a->body, a->var});
            s.active = subst_var(arena, bite->body, bite->u, bite->v, &supply);
            return StepInfo{Label::m, cost};
        }
        case Label::sea3: {
            Slice top = s.stack.back();
            std::size_t cost = top.body->size;
            s.stack.pop_back();
            s.active = subst_var(arena, top.body, top.binder, a->var, &supply);
            return StepInfo{Label::sea3, cost};
        }
    }
    return std::nullopt;  // unreachable
}

OpenContext read_back_env(const Environment& env) {
    OpenContext O;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
        O.append_root(it->binder, it->bite);
    }
    return O;
}

const PositiveTerm* read_back(TermArena& arena, const SlicedState& s, NameSupply* supply) {
    const PositiveTerm* active = s.active;
    for (auto it = s.stack.rbegin(); it != s.stack.rend(); ++it) {
        auto [O, head] = head_split(active);
        const PositiveTerm* merged = subst_var(arena, it->body, it->binder, head, supply);
        active = plug(arena, O, merged);
    }
    return plug(arena, read_back_env(s.env), active);
}

// ------------------------------------------------------------------
// Runs
// ------------------------------------------------------------------

namespace {

template <typename State, typename PeekFn, typename StepFn>
RunReport drive(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                std::size_t budget, PeekFn peek, StepFn step, State init) {
    RunReport r;
    r.initial_size = t->size;
    State s = std::move(init);
    std::size_t principal = 0;
    while (true) {
        std::optional<Label> next = peek(s);
        if (!next) {
            r.status = RunStatus::Normal;
            break;
        }
        if (is_principal(*next) && principal == budget) {
            r.status = RunStatus::BudgetExhausted;
            break;
        }
        std::optional<StepInfo> info = step(arena, s, supply);
        r.counts.of(info->label) += 1;
        r.cost_samples.push_back(*info);
        if (is_principal(info->label)) ++principal;
    }
    if constexpr (std::is_same_v<State, NaturalState>) {
        r.final_natural = std::move(s);
    } else {
        r.final_sliced = std::move(s);
    }
    return r;
}

}  // namespace

RunReport natural_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                      std::size_t budget) {
    return drive<NaturalState>(
        arena, t, supply, budget, [](const NaturalState& s) { return natural_peek(s); },
        [](TermArena& a, NaturalState& s, NameSupply& sup) { return natural_step(a, s, sup); },
        natural_init(arena, t, supply));
}

RunReport sliced_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                     std::size_t budget) {
    return drive<SlicedState>(
        arena, t, supply, budget, [](const SlicedState& s) { return sliced_peek(s); },
        [](TermArena& a, SlicedState& s, NameSupply& sup) { return sliced_step(a, s, sup); },
        sliced_init(arena, t, supply));
}

// ------------------------------------------------------------------
// State invariants
// ------------------------------------------------------------------

namespace {

void report_duplicates(const std::vector<VarId>& binders, const NameSupply& supply,
                       std::vector<std::string>& bad) {
    std::unordered_set<VarId> seen;
    for (VarId b : binders) {
        if (!seen.insert(b).second) {
            bad.push_back("duplicate binder " + supply.name_of(b));
        }
    }
}

}  // namespace

std::vector<std::string> check_state_invariants(const SlicedState& s,
                                                std::size_t initial_size, bool after_e,
                                                const NameSupply& supply) {
    std::vector<std::string> bad;

    // (a) environment read-back is a right context
    if (!is_right_oi(read_back_env(s.env))) {
        bad.push_back("environment read-back is not a right context");
    }

    // (b) well-boundness: binders pairwise distinct across all components
    std::vector<VarId> binders;
    for (const auto& e : s.env) {
        binders.push_back(e.binder);
        collect_binders(e.bite, binders);
    }
    for (const Slice& sl : s.stack) {
        binders.push_back(sl.binder);
        collect_binders(sl.body, binders);
    }
    collect_binders(s.active, binders);
    report_duplicates(binders, supply, bad);

    // (b) environment locality: a binder may occur only inward of its own
    // entry — in younger entries, the stack, or the active term; never in
    // its own bite or an older one.
    const std::size_t n = s.env.size();
    std::vector<Environment::Entry> ents(s.env.begin(), s.env.end());  // oldest first
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            if (occurs_free(ents[j].bite, ents[i].binder)) {
                bad.push_back("environment binder " + supply.name_of(ents[i].binder) +
                              " occurs at or outside its own entry");
            }
        }
    }

    // (b) slice scoping: a slice's binder must not occur above the slice —
    // in later slices, the active term, or the environment.
    for (std::size_t i = 0; i < s.stack.size(); ++i) {
        VarId x = s.stack[i].binder;
        bool leaked = occurs_free(s.active, x);
        for (std::size_t j = i + 1; j < s.stack.size() && !leaked; ++j) {
            leaked = occurs_free(s.stack[j].body, x);
        }
        for (std::size_t j = 0; j < n && !leaked; ++j) {
            leaked = occurs_free(ents[j].bite, x);
        }
        if (leaked) {
            bad.push_back("slice binder " + supply.name_of(x) + " occurs above its slice");
        }
    }

    // (c) sub-term size bound
    if (!after_e && s.active->size > initial_size) {
        bad.push_back("active term exceeds the initial size");
    }
    for (const Slice& sl : s.stack) {
        if (sl.body->size > initial_size) {
            bad.push_back("slice body exceeds the initial size");
            break;
        }
    }
    for (const auto& e : s.env) {
        if (e.bite->size > initial_size) {
            bad.push_back("environment bite exceeds the initial size");
            break;
        }
    }
    return bad;
}

std::vector<std::string> check_state_invariants(const NaturalState& s,
                                                const NameSupply& supply) {
    std::vector<std::string> bad;
    if (!is_right_oi(s.rctx)) {
        bad.push_back("right context fails the rightness predicate");
    }
    std::vector<VarId> binders;
    for (const auto& e : s.rctx) {
        binders.push_back(e.binder);
        collect_binders(e.bite, binders);
    }
    collect_binders(s.active, binders);
    report_duplicates(binders, supply, bad);

    // Entry locality: an entry's binder may occur only inward of the entry.
    for (std::size_t i = 0; i < s.rctx.size(); ++i) {
        for (std::size_t j = i; j < s.rctx.size(); ++j) {
            if (occurs_free(s.rctx[j].bite, s.rctx[i].binder)) {
                bad.push_back("context binder " + supply.name_of(s.rctx[i].binder) +
                              " occurs at or outside its own entry");
            }
        }
    }
    return bad;
}

// ------------------------------------------------------------------
// Traces
// ------------------------------------------------------------------

namespace {

constexpr const char* kEpsilon = "\xce\xb5";  // ε
constexpr const char* kHole = "\xc2\xb7";     // ·

std::string entry_str(VarId binder, const Bite* bite, const NameSupply& supply) {
    return "[" + supply.name_of(binder) + " <- " + to_string(bite, supply) + "]";
}

}  // namespace

std::string trace_line(const SlicedState& s, std::string_view label,
                       const NameSupply& supply) {
    std::string out(label);
    out += " | ";
    out += kEpsilon;
    for (const Slice& sl : s.stack) {  // outermost (bottom) first
        out += " : ";
        out += to_string(sl.body, supply) + "[" + supply.name_of(sl.binder) + " <- " +
               kHole + "]";
    }
    out += " | " + to_string(s.active, supply) + " | ";
    for (auto it = s.env.rbegin(); it != s.env.rend(); ++it) {  // most recent first
        out += entry_str(it->binder, it->bite, supply) + " : ";
    }
    out += kEpsilon;
    return out;
}

std::string trace_line(const NaturalState& s, std::string_view label,
                       const NameSupply& supply) {
    std::string out(label);
    out += " | " + to_string(s.active, supply) + " | ";
    for (const auto& e : s.rctx) {  // innermost first
        out += entry_str(e.binder, e.bite, supply) + " : ";
    }
    out += kEpsilon;
    return out;
}

}  // namespace pom
