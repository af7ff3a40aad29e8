// Executable verification: lockstep machine-vs-strategy bisimulation, the
// diamond property, strategy determinism, right-context predicate agreement,
// transition/cost bounds, invariant-checked runs, the Natural-vs-Sliced
// scaling experiment, and deterministic term generators.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pom/crumble.hpp"
#include "pom/machines.hpp"

namespace pom {

// ------------------------------------------------------------------
// Bisimulation
// ------------------------------------------------------------------

enum class MachineKind { Natural, Sliced };

struct BisimMismatch {
    std::size_t step;   // transition index (1-based)
    std::string kind;   // "label" | "readback" | "halt"
    std::string detail;
};

struct BisimReport {
    std::size_t steps_checked = 0;  // machine transitions examined
    LabelCounts strategy_counts;    // m/e only
    LabelCounts machine_counts;
    std::vector<BisimMismatch> mismatches;
    bool truncated = false;  // budget ran out

    bool pass() const {
        return mismatches.empty() && strategy_counts.m == machine_counts.m &&
               strategy_counts.e == machine_counts.e;
    }
};

// Run the machine on (a fresh copy of) t for at most `budget` principal
// transitions, advancing the right strategy in lockstep: every principal
// transition must match the strategy's next step in label and α-equal
// read-back; every search transition must leave the read-back unchanged; on
// a halt the strategy term must be normal. Stops at the first mismatch.
BisimReport bisimulate(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                       std::size_t budget, MachineKind kind = MachineKind::Sliced);

// ------------------------------------------------------------------
// Diamond property
// ------------------------------------------------------------------

struct DiamondResult {
    bool pass = true;
    std::size_t terms_checked = 0;
    std::size_t pairs_checked = 0;
    std::string counterexample;  // empty when pass
};

// BFS over one-step reducts to `depth`; at every reached term, each pair of
// distinct reducts must share a common one-step reduct. Terms larger than
// `size_cap` are pair-checked but not expanded further.
DiamondResult diamond_check(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                            std::size_t depth = 4, std::size_t size_cap = 80);

// ------------------------------------------------------------------
// Strategy determinism / no premature stops
// ------------------------------------------------------------------

struct StrategyResult {
    bool pass = true;
    std::size_t terms_checked = 0;
    std::string detail;  // first violation
};

// At t and every term reachable within `depth` one-step reductions: at most
// one redex sits in a right position; whenever any redex exists, exactly one
// does and right_step agrees with the filter oracle.
StrategyResult strategy_checks(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                               std::size_t depth = 3);

// ------------------------------------------------------------------
// Right-context predicate agreement
// ------------------------------------------------------------------

struct AgreementResult {
    bool pass = true;
    std::uint64_t contexts_checked = 0;
    std::string counterexample;
};

// Exhaustively enumerate open contexts with at most `max_entries` entries
// whose binders and variables are drawn from a fresh alphabet of
// `alphabet_size` names (abstraction bodies restricted to single variables),
// asserting the outside-in and inside-out rightness predicates agree.
AgreementResult right_ctx_agreement(std::size_t max_entries, std::size_t alphabet_size = 3);

// ------------------------------------------------------------------
// Transition-count and per-cost bounds
// ------------------------------------------------------------------

struct BoundsResult {
    bool pass = true;
    std::vector<std::string> violations;
};

// Exact inequalities on a Sliced run report:
//   |r|_e <= |r|_m + 1;  |r|_sea3 <= |r|_m;
//   |r|_sea1 + |r|_sea2 <= initial_size * (|r|_e + |r|_sea3 + 1);
//   every e/m/sea3 cost sample <= initial_size; sea1/sea2 samples cost 1.
BoundsResult check_bounds(const RunReport& report);

// ------------------------------------------------------------------
// Invariant-checked runs
// ------------------------------------------------------------------

struct CheckedRun {
    RunReport report;
    std::vector<std::string> violations;  // empty = all states passed
};

// Like sliced_run / natural_run, but verifies check_state_invariants at
// every state (with the after-e exemption), bounds each burst of search
// transitions by the termination measure (active size plus slice body sizes
// at the preceding principal transition), and on a normal halt requires the
// final shape and a redex-free read-back.
CheckedRun checked_sliced_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                              std::size_t budget);
CheckedRun checked_natural_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                               std::size_t budget);

// ------------------------------------------------------------------
// Scaling experiment
// ------------------------------------------------------------------

struct ScalingRow {
    std::size_t budget;
    std::size_t natural_cost;  // cumulative principal cost
    std::size_t sliced_cost;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    std::vector<double> natural_ratios;  // rows[i].cost / rows[i-1].cost
    std::vector<double> sliced_ratios;
};

// Run both machines on t at each budget and record cumulative principal
// cost; ratios compare consecutive rows.
ScalingReport scaling_experiment(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                                 const std::vector<std::size_t>& budgets);

// ------------------------------------------------------------------
// Generators
// ------------------------------------------------------------------

// Deterministic size-bounded random λ-term: binder-aware (leaf variables
// pick an enclosing binder with probability 0.8 when one exists, otherwise a
// free name from a small pool), so closed and open terms both occur.
const LambdaTerm* gen_random_lambda(TermArena& arena, NameSupply& supply,
                                    std::uint64_t seed, std::size_t size);

// Deterministic random λ-term wrapped in 2-4 stacked redex applications, so
// the translated spine carries several coexisting redexes. Plain random
// terms translate almost exclusively to inert application entries, which
// starves pairwise-joinability checks; this generator keeps them populated.
const LambdaTerm* gen_redex_rich_lambda(TermArena& arena, NameSupply& supply,
                                        std::uint64_t seed);

// The looping positive term x[x <- y y][y <- \z.w[w <- z z]].
const PositiveTerm* gen_omega_positive(TermArena& arena, NameSupply& supply);

// The growing loop tau3[y <- \y.tau3] with tau3 = x[x <- y z][z <- y y].
const PositiveTerm* gen_tau3_loop(TermArena& arena, NameSupply& supply);

// Church numeral n applied to Church numeral m (a normalizing family).
const LambdaTerm* gen_church_app(TermArena& arena, NameSupply& supply, unsigned n,
                                 unsigned m);

}  // namespace pom
