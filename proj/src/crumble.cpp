#include "pom/crumble.hpp"

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pom {

namespace {

// ---------------------------------------------------------------------------
// Translation
// ---------------------------------------------------------------------------

struct Crumbler {
    TermArena& arena;
    NameSupply& supply;
    int next_display = 1;
    std::unordered_map<VarId, VarId> renamed;  // binder pre-pass map

    VarId fresh_v() { return supply.fresh("v" + std::to_string(next_display++)); }

    // Pre-pass: give every binder a fresh id, numbering them in
    // leftmost-outermost order. Free variables are left untouched.
    const LambdaTerm* rename(const LambdaTerm* t) {
        switch (t->kind) {
            case LambdaTerm::Kind::Var: {
                auto it = renamed.find(t->var);
                return it == renamed.end() ? t : arena.lvar(it->second);
            }
            case LambdaTerm::Kind::Abs: {
                VarId nb = fresh_v();
                auto it = renamed.find(t->var);
                bool had = it != renamed.end();
                VarId old = had ? it->second : 0;
                renamed[t->var] = nb;
                const LambdaTerm* body = rename(t->a);
                if (had) {
                    renamed[t->var] = old;
                } else {
                    renamed.erase(t->var);
                }
                return arena.labs(nb, body);
            }
            case LambdaTerm::Kind::App: {
                const LambdaTerm* fn = rename(t->a);
                const LambdaTerm* arg = rename(t->b);
                return arena.lapp(fn, arg);
            }
        }
        return t;  // unreachable
    }

    // Translate t to a variable head, appending the generated entries to
    // `out` in sequence order (each append is one entry further out).
    VarId forced(const LambdaTerm* t, OpenContext& out) {
        switch (t->kind) {
            case LambdaTerm::Kind::Var:
                return t->var;
            case LambdaTerm::Kind::Abs: {
                VarId v = fresh_v();
                out.append_root(v, arena.abs(t->var, full(t->a)));
                return v;
            }
            case LambdaTerm::Kind::App: {
                VarId w = fresh_v();
                // Function side first: inline an abstraction into the bite,
                // otherwise force a variable head.
                OpenContext fn_spine;
                const PositiveTerm* inlined_body = nullptr;
                VarId fn_head = 0;
                if (t->a->kind == LambdaTerm::Kind::Abs) {
                    inlined_body = full(t->a->a);
                } else {
                    fn_head = forced(t->a, fn_spine);
                }
                // Argument side.
                OpenContext arg_spine;
                VarId arg_head = forced(t->b, arg_spine);

                const Bite* bite = inlined_body != nullptr
                                       ? arena.redex_app(t->a->var, inlined_body, arg_head)
                                       : arena.var_app(fn_head, arg_head);
                out.append_root(w, bite);
                for (const auto& e : fn_spine) out.append_root(e.binder, e.bite);
                for (const auto& e : arg_spine) out.append_root(e.binder, e.bite);
                return w;
            }
        }
        return 0;  // unreachable
    }

    const PositiveTerm* full(const LambdaTerm* t) {
        OpenContext spine;
        VarId head = forced(t, spine);
        return plug(arena, spine, arena.pvar(head));
    }
};

// ---------------------------------------------------------------------------
// Unfolding
// ---------------------------------------------------------------------------

constexpr std::size_t kMaxUnfoldDepth = 20'000;

struct Unfolder {
    TermArena& arena;
    NameSupply& supply;
    std::size_t budget;
    std::size_t built = 0;
    std::size_t depth = 0;

    void spend() {
        if (++built > budget) throw UnfoldOverflow("unfold overflow");
    }

    struct DepthGuard {
        Unfolder& u;
        explicit DepthGuard(Unfolder& u_) : u(u_) {
            if (++u.depth > kMaxUnfoldDepth) throw UnfoldOverflow("unfold overflow");
        }
        ~DepthGuard() { --u.depth; }
    };

    const LambdaTerm* lvar(VarId x) {
        spend();
        return arena.lvar(x);
    }
    const LambdaTerm* labs(VarId b, const LambdaTerm* body) {
        spend();
        return arena.labs(b, body);
    }
    const LambdaTerm* lapp(const LambdaTerm* f, const LambdaTerm* a) {
        spend();
        return arena.lapp(f, a);
    }

    // Capture-avoiding substitution t{x <- s} on lambda-terms. Shares
    // untouched subtrees; fv_s is the free-variable set of s.
    const LambdaTerm* subst(const LambdaTerm* t, VarId x, const LambdaTerm* s,
                            const std::unordered_set<VarId>& fv_s) {
        DepthGuard guard(*this);
        switch (t->kind) {
            case LambdaTerm::Kind::Var:
                return t->var == x ? s : t;
            case LambdaTerm::Kind::Abs: {
                if (t->var == x) return t;  // shadowed
                const LambdaTerm* body = t->a;
                VarId binder = t->var;
                if (fv_s.count(binder) != 0 && occurs_free(body, x)) {
                    VarId nb = supply.fresh(supply.name_of(binder));
                    std::unordered_set<VarId> fv_nb{nb};
                    body = subst(body, binder, lvar(nb), fv_nb);
                    binder = nb;
                }
                const LambdaTerm* nbody = subst(body, x, s, fv_s);
                if (nbody == t->a && binder == t->var) return t;
                return labs(binder, nbody);
            }
            case LambdaTerm::Kind::App: {
                const LambdaTerm* nf = subst(t->a, x, s, fv_s);
                const LambdaTerm* na = subst(t->b, x, s, fv_s);
                if (nf == t->a && na == t->b) return t;
                return lapp(nf, na);
            }
        }
        return t;  // unreachable
    }

    const LambdaTerm* subst(const LambdaTerm* t, VarId x, const LambdaTerm* s) {
        std::vector<VarId> fv = free_vars(s);
        std::unordered_set<VarId> fv_s(fv.begin(), fv.end());
        return subst(t, x, s, fv_s);
    }

    const LambdaTerm* unfold_bite(const Bite* b) {
        DepthGuard guard(*this);
        switch (b->kind) {
            case Bite::Kind::VarApp:
                return lapp(lvar(b->u), lvar(b->v));
            case Bite::Kind::Abs:
                return labs(b->u, unfold_term(b->body));
            case Bite::Kind::RedexApp:
                return lapp(labs(b->u, unfold_term(b->body)), lvar(b->v));
        }
        return nullptr;  // unreachable
    }

    const LambdaTerm* unfold_term(const PositiveTerm* t) {
        DepthGuard guard(*this);
        // Walk the spine iteratively, then substitute hole-outward.
        std::vector<const PositiveTerm*> nodes;  // root first
        const PositiveTerm* cur = t;
        while (cur->kind == PositiveTerm::Kind::ES) {
            nodes.push_back(cur);
            cur = cur->body;
        }
        const LambdaTerm* acc = lvar(cur->var);
        for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
            acc = subst(acc, (*it)->var, unfold_bite((*it)->bite));
        }
        return acc;
    }
};

}  // namespace

const PositiveTerm* crumble(TermArena& arena, const LambdaTerm* t, NameSupply& supply) {
    Crumbler c{arena, supply, 1, {}};
    return c.full(c.rename(t));
}

const LambdaTerm* unfold(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                         std::size_t node_budget) {
    Unfolder u{arena, supply, node_budget, 0, 0};
    return u.unfold_term(t);
}

}  // namespace pom
