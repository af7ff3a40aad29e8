#include "pom/harness.hpp"

#include <deque>
#include <functional>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace pom {

// ------------------------------------------------------------------
// Bisimulation
// ------------------------------------------------------------------

namespace {

template <typename State, typename PeekFn, typename StepFn, typename ReadFn>
BisimReport bisim_impl(TermArena& arena, NameSupply& supply, std::size_t budget,
                       State state, PeekFn peek, StepFn step, ReadFn read) {
    BisimReport r;
    const PositiveTerm* shadow = read(state);
    std::size_t principal = 0;
    while (true) {
        std::optional<Label> next = peek(state);
        if (!next) {
            if (!is_normal(shadow)) {
                r.mismatches.push_back({r.steps_checked, "halt",
                                        "machine halted but the strategy can still step"});
            }
            break;
        }
        if (is_principal(*next) && principal == budget) {
            r.truncated = true;
            break;
        }
        std::optional<StepInfo> info = step(state);
        ++r.steps_checked;
        r.machine_counts.of(info->label) += 1;
        const PositiveTerm* now = read(state);
        if (is_principal(info->label)) {
            ++principal;
            std::optional<RightStep> st = right_step(arena, shadow, supply);
            if (!st) {
                r.mismatches.push_back({r.steps_checked, "label",
                                        std::string("machine fired ") +
                                            label_name(info->label) +
                                            " but the strategy is stuck"});
                break;
            }
            r.strategy_counts.of(st->label) += 1;
            if (st->label != info->label) {
                r.mismatches.push_back({r.steps_checked, "label",
                                        std::string("machine fired ") +
                                            label_name(info->label) + " but the strategy fired " +
                                            label_name(st->label)});
                break;
            }
            if (!alpha_eq(st->term, now)) {
                r.mismatches.push_back({r.steps_checked, "readback",
                                        "principal transition and strategy step disagree"});
                break;
            }
            shadow = st->term;
        } else {
            if (!alpha_eq(now, shadow)) {
                r.mismatches.push_back({r.steps_checked, "readback",
                                        "search transition changed the read-back"});
                break;
            }
        }
    }
    return r;
}

}  // namespace

BisimReport bisimulate(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                       std::size_t budget, MachineKind kind) {
    if (kind == MachineKind::Natural) {
        return bisim_impl(
            arena, supply, budget, natural_init(arena, t, supply),
            [](const NaturalState& s) { return natural_peek(s); },
            [&](NaturalState& s) { return natural_step(arena, s, supply); },
            [&](const NaturalState& s) { return natural_read_back(arena, s); });
    }
    return bisim_impl(
        arena, supply, budget, sliced_init(arena, t, supply),
        [](const SlicedState& s) { return sliced_peek(s); },
        [&](SlicedState& s) { return sliced_step(arena, s, supply); },
        [&](const SlicedState& s) { return read_back(arena, s, &supply); });
}

// ------------------------------------------------------------------
// Diamond property
// ------------------------------------------------------------------

namespace {

struct ReductCache {
    TermArena& arena;
    NameSupply& supply;
    struct Node {
        const PositiveTerm* term;
        std::vector<const PositiveTerm*> reducts;
        std::vector<std::string> reduct_keys;
    };
    std::unordered_map<std::string, Node> memo;

    const Node& get(const PositiveTerm* t, const std::string& key) {
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Node n;
        n.term = t;
        for (const Redex& r : enumerate_redexes(arena, t, supply)) {
            n.reducts.push_back(r.reduct);
            n.reduct_keys.push_back(canon_key(r.reduct));
        }
        return memo.emplace(key, std::move(n)).first->second;
    }
    const Node& get(const PositiveTerm* t) { return get(t, canon_key(t)); }
};

}  // namespace

DiamondResult diamond_check(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                            std::size_t depth, std::size_t size_cap) {
    DiamondResult out;
    ReductCache cache{arena, supply, {}};
    std::unordered_set<std::string> visited;
    std::deque<std::pair<const PositiveTerm*, std::size_t>> queue;
    queue.push_back({t, 0});
    visited.insert(canon_key(t));
    constexpr std::size_t kNodeCap = 20'000;

    while (!queue.empty() && out.terms_checked < kNodeCap) {
        auto [u, d] = queue.front();
        queue.pop_front();
        ++out.terms_checked;
        const ReductCache::Node& node = cache.get(u);

        // Pairwise joinability of distinct one-step reducts.
        for (std::size_t i = 0; i < node.reducts.size() && out.pass; ++i) {
            for (std::size_t j = i + 1; j < node.reducts.size() && out.pass; ++j) {
                if (node.reduct_keys[i] == node.reduct_keys[j]) continue;  // α-equal
                ++out.pairs_checked;
                const ReductCache::Node& a =
                    cache.get(node.reducts[i], node.reduct_keys[i]);
                const ReductCache::Node& b =
                    cache.get(node.reducts[j], node.reduct_keys[j]);
                std::unordered_set<std::string> a_keys(a.reduct_keys.begin(),
                                                       a.reduct_keys.end());
                bool joined = false;
                for (const std::string& k : b.reduct_keys) {
                    if (a_keys.count(k) != 0) {
                        joined = true;
                        break;
                    }
                }
                if (!joined) {
                    out.pass = false;
                    out.counterexample = "term " + canon_key(u) + " has unjoinable reducts " +
                                         node.reduct_keys[i] + " and " + node.reduct_keys[j];
                }
            }
        }
        if (!out.pass) break;

        if (d < depth) {
            for (std::size_t i = 0; i < node.reducts.size(); ++i) {
                const PositiveTerm* v = node.reducts[i];
                if (v->size > size_cap) continue;
                if (visited.insert(node.reduct_keys[i]).second) {
                    queue.push_back({v, d + 1});
                }
            }
        }
    }
    return out;
}

// ------------------------------------------------------------------
// Strategy checks
// ------------------------------------------------------------------

StrategyResult strategy_checks(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                               std::size_t depth) {
    StrategyResult out;
    std::unordered_set<std::string> visited;
    std::deque<std::pair<const PositiveTerm*, std::size_t>> queue;
    queue.push_back({t, 0});
    visited.insert(canon_key(t));
    constexpr std::size_t kNodeCap = 20'000;

    while (!queue.empty() && out.terms_checked < kNodeCap) {
        auto [u, d] = queue.front();
        queue.pop_front();
        ++out.terms_checked;

        std::vector<Redex> rs = enumerate_redexes(arena, u, supply);
        std::size_t right_count = 0;
        std::size_t right_pos = 0;
        for (const Redex& r : rs) {
            if (is_right_oi(r.position)) {
                ++right_count;
                right_pos = r.pos;
            }
        }
        std::optional<Redex> rr = right_redex(arena, u, supply);
        if (right_count > 1) {
            out.pass = false;
            out.detail = "more than one right-positioned redex in " + canon_key(u);
            break;
        }
        if (!rs.empty() && right_count == 0) {
            out.pass = false;
            out.detail = "redexes exist but none is right-positioned in " + canon_key(u);
            break;
        }
        if (rr.has_value() != (right_count == 1) ||
            (rr.has_value() && rr->pos != right_pos)) {
            out.pass = false;
            out.detail = "right_redex disagrees with the filter oracle in " + canon_key(u);
            break;
        }

        if (d < depth) {
            for (const Redex& r : rs) {
                if (visited.insert(canon_key(r.reduct)).second) {
                    queue.push_back({r.reduct, d + 1});
                }
            }
        }
    }
    return out;
}

// ------------------------------------------------------------------
// Right-context predicate agreement
// ------------------------------------------------------------------

AgreementResult right_ctx_agreement(std::size_t max_entries, std::size_t alphabet_size) {
    AgreementResult out;
    TermArena arena;
    NameSupply supply;
    std::vector<VarId> alphabet;
    for (std::size_t i = 0; i < alphabet_size; ++i) {
        alphabet.push_back(supply.fresh("a" + std::to_string(i + 1)));
    }

    // All bite shapes over the alphabet, abstraction bodies being single
    // variables: y z | \w.v | (\w.v) z.
    std::vector<const Bite*> bites;
    for (VarId y : alphabet)
        for (VarId z : alphabet) bites.push_back(arena.var_app(y, z));
    for (VarId w : alphabet)
        for (VarId v : alphabet) bites.push_back(arena.abs(w, arena.pvar(v)));
    for (VarId w : alphabet)
        for (VarId v : alphabet)
            for (VarId z : alphabet) bites.push_back(arena.redex_app(w, arena.pvar(v), z));

    OpenContext O;
    std::function<void(std::size_t)> rec = [&](std::size_t remaining) {
        if (!out.pass) return;
        ++out.contexts_checked;
        if (is_right_oi(O) != is_right_io(O)) {
            out.pass = false;
            std::string cex;
            for (const auto& e : O) {
                cex += "[" + supply.name_of(e.binder) + " <- " +
                       to_string(e.bite, supply) + "]";
            }
            out.counterexample = cex.empty() ? "<empty>" : cex;
            return;
        }
        if (remaining == 0) return;
        for (VarId x : alphabet) {
            for (const Bite* b : bites) {
                O.append_root(x, b);
                rec(remaining - 1);
                O.pop_root();
                if (!out.pass) return;
            }
        }
    };
    rec(max_entries);
    return out;
}

// ------------------------------------------------------------------
// Bounds
// ------------------------------------------------------------------

BoundsResult check_bounds(const RunReport& r) {
    BoundsResult out;
    const LabelCounts& c = r.counts;
    if (c.e > c.m + 1) {
        out.violations.push_back("exponential count exceeds multiplicative count + 1");
    }
    if (c.sea3 > c.m) {
        out.violations.push_back("sea3 count exceeds multiplicative count");
    }
    if (c.sea1 + c.sea2 > r.initial_size * (c.e + c.sea3 + 1)) {
        out.violations.push_back("search count exceeds initial_size * (e + sea3 + 1)");
    }
    for (std::size_t i = 0; i < r.cost_samples.size(); ++i) {
        const StepInfo& s = r.cost_samples[i];
        if (s.label == Label::sea1 || s.label == Label::sea2) {
            if (s.cost != 1) {
                out.violations.push_back("search transition " + std::to_string(i) +
                                         " has non-unit cost");
            }
        } else if (s.cost > r.initial_size) {
            out.violations.push_back(std::string(label_name(s.label)) + " transition " +
                                     std::to_string(i) + " costs more than the initial size");
        }
    }
    out.pass = out.violations.empty();
    return out;
}

// ------------------------------------------------------------------
// Invariant-checked runs
// ------------------------------------------------------------------

CheckedRun checked_sliced_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                              std::size_t budget) {
    CheckedRun out;
    RunReport& r = out.report;
    r.initial_size = t->size;
    SlicedState s = sliced_init(arena, t, supply);

    auto record = [&](std::size_t step_idx, const std::vector<std::string>& bad) {
        for (const std::string& m : bad) {
            out.violations.push_back("state " + std::to_string(step_idx) + ": " + m);
        }
    };
    record(0, check_state_invariants(s, r.initial_size, false, supply));

    auto measure = [&]() {
        std::size_t m = s.active->size;
        for (const Slice& sl : s.stack) m += sl.body->size;
        return m;
    };
    std::size_t burst_allowance = measure();
    std::size_t burst = 0;
    bool burst_flagged = false;
    std::size_t principal = 0;
    std::size_t step_idx = 0;

    while (true) {
        std::optional<Label> next = sliced_peek(s);
        if (!next) {
            r.status = RunStatus::Normal;
            break;
        }
        if (is_principal(*next) && principal == budget) {
            r.status = RunStatus::BudgetExhausted;
            break;
        }
        std::optional<StepInfo> info = sliced_step(arena, s, supply);
        ++step_idx;
        r.counts.of(info->label) += 1;
        r.cost_samples.push_back(*info);
        if (is_principal(info->label)) {
            ++principal;
            burst = 0;
            burst_allowance = measure();
        } else {
            ++burst;
            if (burst > burst_allowance && !burst_flagged) {
                out.violations.push_back("state " + std::to_string(step_idx) +
                                         ": search burst exceeds the termination measure");
                burst_flagged = true;
            }
        }
        record(step_idx, check_state_invariants(s, r.initial_size,
                                                info->label == Label::e, supply));
    }

    if (r.status == RunStatus::Normal) {
        if (!(s.active->kind == PositiveTerm::Kind::Var && s.stack.empty())) {
            out.violations.push_back("final state does not have the halt shape");
        }
        if (!is_normal(read_back(arena, s, &supply))) {
            out.violations.push_back("final read-back still has a redex");
        }
    }
    r.final_sliced = std::move(s);
    return out;
}

CheckedRun checked_natural_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                               std::size_t budget) {
    CheckedRun out;
    RunReport& r = out.report;
    r.initial_size = t->size;
    NaturalState s = natural_init(arena, t, supply);

    auto record = [&](std::size_t step_idx, const std::vector<std::string>& bad) {
        for (const std::string& m : bad) {
            out.violations.push_back("state " + std::to_string(step_idx) + ": " + m);
        }
    };
    record(0, check_state_invariants(s, supply));

    std::size_t burst_allowance = s.active->size;
    std::size_t burst = 0;
    bool burst_flagged = false;
    std::size_t principal = 0;
    std::size_t step_idx = 0;

    while (true) {
        std::optional<Label> next = natural_peek(s);
        if (!next) {
            r.status = RunStatus::Normal;
            break;
        }
        if (is_principal(*next) && principal == budget) {
            r.status = RunStatus::BudgetExhausted;
            break;
        }
        std::optional<StepInfo> info = natural_step(arena, s, supply);
        ++step_idx;
        r.counts.of(info->label) += 1;
        r.cost_samples.push_back(*info);
        if (is_principal(info->label)) {
            ++principal;
            burst = 0;
            burst_allowance = s.active->size;
        } else {
            ++burst;
            if (burst > burst_allowance && !burst_flagged) {
                out.violations.push_back("state " + std::to_string(step_idx) +
                                         ": search burst exceeds the termination measure");
                burst_flagged = true;
            }
        }
        record(step_idx, check_state_invariants(s, supply));
    }

    if (r.status == RunStatus::Normal) {
        if (s.active->kind != PositiveTerm::Kind::Var) {
            out.violations.push_back("final state does not have the halt shape");
        }
        if (!is_normal(natural_read_back(arena, s))) {
            out.violations.push_back("final read-back still has a redex");
        }
    }
    r.final_natural = std::move(s);
    return out;
}

// ------------------------------------------------------------------
// Scaling
// ------------------------------------------------------------------

ScalingReport scaling_experiment(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                                 const std::vector<std::size_t>& budgets) {
    ScalingReport rep;
    for (std::size_t k : budgets) {
        RunReport nat = natural_run(arena, t, supply, k);
        RunReport sl = sliced_run(arena, t, supply, k);
        rep.rows.push_back({k, nat.principal_cost(), sl.principal_cost()});
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        auto ratio = [](std::size_t now, std::size_t before) {
            return before == 0 ? 0.0 : static_cast<double>(now) / static_cast<double>(before);
        };
        rep.natural_ratios.push_back(ratio(rep.rows[i].natural_cost, rep.rows[i - 1].natural_cost));
        rep.sliced_ratios.push_back(ratio(rep.rows[i].sliced_cost, rep.rows[i - 1].sliced_cost));
    }
    return rep;
}

// ------------------------------------------------------------------
// Generators
// ------------------------------------------------------------------

const LambdaTerm* gen_random_lambda(TermArena& arena, NameSupply& supply,
                                    std::uint64_t seed, std::size_t size) {
    std::mt19937_64 rng(seed);
    std::vector<VarId> scope;

    std::function<const LambdaTerm*(std::size_t)> gen = [&](std::size_t budget)
        -> const LambdaTerm* {
        auto leaf = [&]() -> const LambdaTerm* {
            if (!scope.empty() && rng() % 10 < 8) {
                return arena.lvar(scope[rng() % scope.size()]);
            }
            return arena.lvar(supply.intern("f" + std::to_string(1 + rng() % 4)));
        };
        if (budget <= 1) return leaf();
        std::uint64_t pick = rng() % 4;
        if (pick == 0) return leaf();
        if (pick == 1 || budget < 3) {
            VarId binder = supply.fresh("x");
            scope.push_back(binder);
            const LambdaTerm* body = gen(budget - 1);
            scope.pop_back();
            return arena.labs(binder, body);
        }
        std::size_t left = 1 + rng() % (budget - 2);
        const LambdaTerm* fn = gen(left);
        const LambdaTerm* arg = gen(budget - 1 - left);
        return arena.lapp(fn, arg);
    };
    return gen(size);
}

const LambdaTerm* gen_redex_rich_lambda(TermArena& arena, NameSupply& supply,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
    const LambdaTerm* t = gen_random_lambda(arena, supply, rng(), 3 + rng() % 5);
    std::uint64_t layers = 2 + rng() % 3;
    for (std::uint64_t j = 0; j < layers; ++j) {
        VarId binder = supply.fresh("r");
        const LambdaTerm* body = gen_random_lambda(arena, supply, rng(), 3 + rng() % 6);
        if (rng() % 2) {
            t = arena.lapp(arena.labs(binder, body), t);
        } else {
            const LambdaTerm* arg = gen_random_lambda(arena, supply, rng(), 3 + rng() % 4);
            t = arena.lapp(arena.labs(binder, t), arg);
        }
    }
    return t;
}

const PositiveTerm* gen_omega_positive(TermArena& arena, NameSupply& supply) {
    return parse_positive("x[x <- y y][y <- \\z.w[w <- z z]]", arena, supply);
}

const PositiveTerm* gen_tau3_loop(TermArena& arena, NameSupply& supply) {
    return parse_positive("x[x <- y z][z <- y y][y <- \\y.x[x <- y z][z <- y y]]", arena,
                          supply);
}

const LambdaTerm* gen_church_app(TermArena& arena, NameSupply& supply, unsigned n,
                                 unsigned m) {
    auto church = [&](unsigned k) -> const LambdaTerm* {
        VarId s = supply.fresh("s");
        VarId z = supply.fresh("z");
        const LambdaTerm* body = arena.lvar(z);
        for (unsigned i = 0; i < k; ++i) {
            body = arena.lapp(arena.lvar(s), body);
        }
        return arena.labs(s, arena.labs(z, body));
    };
    const LambdaTerm* fn = church(n);
    const LambdaTerm* arg = church(m);
    return arena.lapp(fn, arg);
}

}  // namespace pom
