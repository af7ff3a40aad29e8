// Acceptance gate: ten end-to-end criteria, one verdict line each.
// Exit status 0 iff every criterion passes. All tolerances are pinned here.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "pom/harness.hpp"

using namespace pom;

namespace {

// ---- pinned tolerances ------------------------------------------------
constexpr double kGoldenTraceBudgetMs = 1.0;    // criterion 1
constexpr double kNaturalPrefixBudgetMs = 1.0;  // criterion 2
constexpr std::size_t kBisimTerms = 500;        // criterion 3
constexpr std::size_t kBisimMaxSize = 40;
constexpr std::size_t kBisimPrincipalBudget = 1000;
constexpr double kBisimBudgetS = 30.0;
constexpr std::size_t kDiamondTerms = 300;      // criterion 4
constexpr std::size_t kDiamondDepth = 4;
constexpr std::size_t kDiamondSizeCap = 80;
constexpr double kDiamondBudgetS = 30.0;
constexpr std::size_t kAgreementEntries = 4;    // criterion 5
constexpr std::size_t kAgreementAlphabet = 3;
constexpr std::uint64_t kAgreementContexts = 334629361ull;
constexpr double kAgreementBudgetS = 10.0;
constexpr double kNaturalRatioLo = 3.5;         // criterion 9
constexpr double kNaturalRatioHi = 4.3;
constexpr double kSlicedRatioLo = 1.8;
constexpr double kSlicedRatioHi = 2.2;
constexpr double kScalingBudgetS = 10.0;
constexpr std::size_t kRoundTripTerms = 1000;   // criterion 10
constexpr std::size_t kRoundTripMaxSize = 60;
constexpr std::size_t kRoundTripMaxOverflows = 50;
constexpr double kRoundTripBudgetS = 30.0;

constexpr const char* kWorkedLambda = "(\\x.x x) ((\\z.z) (\\z.z))";
constexpr const char* kDiamondExample = "z[x <- y y][z <- (\\w.w) y'][y <- \\x'.x']";

struct Verdict {
    bool pass = true;
    std::string detail;
    double seconds = 0.0;

    void fail(const std::string& d) {
        if (pass) detail = d;  // keep the first cause
        pass = false;
    }
    void require(bool cond, const std::string& d) {
        if (!cond) fail(d);
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared random corpus: seed i (1-based), lambda size 4 + (i-1) % 37 <= 40.
const LambdaTerm* corpus_lambda(TermArena& arena, NameSupply& supply, std::size_t i,
                                std::size_t max_size) {
    std::size_t span = max_size - 3;  // sizes 4 .. max_size
    return gen_random_lambda(arena, supply, i, 4 + (i - 1) % span);
}

// ---- criterion 1: golden sliced trace ---------------------------------
Verdict golden_sliced_trace() {
    Verdict v;
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t =
        crumble(arena, parse_lambda(kWorkedLambda, arena, supply), supply);

    auto t0 = std::chrono::steady_clock::now();
    RunReport r = sliced_run(arena, t, supply, 100);
    const PositiveTerm* rb = read_back(arena, *r.final_sliced, &supply);
    v.seconds = seconds_since(t0);

    std::vector<Label> expect = {Label::sea1, Label::m, Label::sea3, Label::m,
                                 Label::e,    Label::m, Label::sea3, Label::sea3};
    v.require(r.cost_samples.size() == expect.size(), "wrong transition count");
    for (std::size_t i = 0; i < expect.size() && v.pass; ++i) {
        v.require(r.cost_samples[i].label == expect[i],
                  "label mismatch at transition " + std::to_string(i + 1));
    }
    v.require(r.status == RunStatus::Normal, "did not halt");
    const SlicedState& fin = *r.final_sliced;
    v.require(fin.stack.empty(), "final stack not empty");
    v.require(fin.active->kind == PositiveTerm::Kind::Var, "final active not a variable");
    v.require(fin.env.size() == 1, "final environment not a single entry");
    if (v.pass) {
        const auto& entry = *fin.env.begin();
        v.require(entry.binder == fin.active->var,
                  "active variable is not the environment binder");
        v.require(entry.bite->kind == Bite::Kind::Abs &&
                      entry.bite->body->kind == PositiveTerm::Kind::Var &&
                      entry.bite->body->var == entry.bite->u,
                  "environment entry is not an identity abstraction");
    }
    v.require(alpha_eq(rb, parse_positive("v[v <- \\w.w]", arena, supply)),
              "read-back not alpha-equal to the expected term");
    v.require(v.seconds * 1000.0 < kGoldenTraceBudgetMs, "run exceeded the time budget");
    return v;
}

// ---- criterion 2: natural machine prefix on the self-replicator -------
Verdict natural_prefix() {
    Verdict v;
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* omega = gen_omega_positive(arena, supply);

    auto t0 = std::chrono::steady_clock::now();
    NaturalState s = natural_init(arena, omega, supply);
    std::vector<Label> labels;
    for (int i = 0; i < 3; ++i) {
        auto info = natural_step(arena, s, supply);
        if (!info) break;
        labels.push_back(info->label);
    }
    v.seconds = seconds_since(t0);

    v.require(labels ==
                  std::vector<Label>{Label::sea1, Label::e, Label::m},
              "first three labels are not sea1, e, m");
    // Active must be w'[w' <- y y] up to naming, with y the context binder.
    v.require(s.active->kind == PositiveTerm::Kind::ES &&
                  s.active->body->kind == PositiveTerm::Kind::Var &&
                  s.active->body->var == s.active->var &&
                  s.active->bite->kind == Bite::Kind::VarApp,
              "active is not a self-application under one entry");
    if (v.pass) {
        v.require(!s.rctx.empty() && s.active->bite->u == s.active->bite->v &&
                      s.active->bite->u == s.rctx.innermost().binder,
                  "applied variable is not the context binder");
    }
    v.require(v.seconds * 1000.0 < kNaturalPrefixBudgetMs, "run exceeded the time budget");
    return v;
}

// ---- criterion 3: bisimulation over the random corpus -----------------
Verdict bisimulation_corpus() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 1; i <= kBisimTerms && v.pass; ++i) {
        TermArena arena;
        NameSupply supply;
        const PositiveTerm* t =
            crumble(arena, corpus_lambda(arena, supply, i, kBisimMaxSize), supply);
        for (MachineKind kind : {MachineKind::Sliced, MachineKind::Natural}) {
            BisimReport r = bisimulate(arena, t, supply, kBisimPrincipalBudget, kind);
            if (!r.pass()) {
                std::string which = kind == MachineKind::Sliced ? "sliced" : "natural";
                v.fail("seed " + std::to_string(i) + " (" + which + "): " +
                       (r.mismatches.empty() ? "per-label counts differ"
                                             : r.mismatches.front().kind + " — " +
                                                   r.mismatches.front().detail));
                break;
            }
        }
    }
    v.seconds = seconds_since(t0);
    v.require(v.seconds < kBisimBudgetS, "corpus exceeded the time budget");
    return v;
}

// ---- criterion 4: diamond property ------------------------------------
Verdict diamond_property() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    {
        TermArena arena;
        NameSupply supply;
        const PositiveTerm* t = parse_positive(kDiamondExample, arena, supply);
        DiamondResult d = diamond_check(arena, t, supply, kDiamondDepth, kDiamondSizeCap);
        v.require(d.pass && d.pairs_checked >= 1,
                  "two-redex example: " + (d.pass ? "no pairs checked" : d.counterexample));
    }
    std::size_t pairs = 0;
    for (std::size_t i = 1; i <= kDiamondTerms && v.pass; ++i) {
        TermArena arena;
        NameSupply supply;
        const LambdaTerm* l = i % 2 == 0 ? corpus_lambda(arena, supply, i, 25)
                                         : gen_redex_rich_lambda(arena, supply, i);
        const PositiveTerm* t = crumble(arena, l, supply);
        DiamondResult d = diamond_check(arena, t, supply, kDiamondDepth, kDiamondSizeCap);
        pairs += d.pairs_checked;
        if (!d.pass) v.fail("seed " + std::to_string(i) + ": " + d.counterexample);
    }
    v.require(pairs >= kDiamondTerms, "corpus joined only " + std::to_string(pairs) +
                                          " peak pairs; not representative");
    v.seconds = seconds_since(t0);
    v.require(v.seconds < kDiamondBudgetS, "corpus exceeded the time budget");
    return v;
}

// ---- criterion 5: right-context predicate agreement --------------------
Verdict predicate_agreement() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    AgreementResult a = right_ctx_agreement(kAgreementEntries, kAgreementAlphabet);
    v.seconds = seconds_since(t0);
    v.require(a.pass, "predicates disagree on " + a.counterexample);
    v.require(a.contexts_checked == kAgreementContexts,
              "enumeration size " + std::to_string(a.contexts_checked) + " != expected " +
                  std::to_string(kAgreementContexts));
    v.require(v.seconds < kAgreementBudgetS, "enumeration exceeded the time budget");
    return v;
}

// ---- criterion 6: strategy uniqueness and progress ---------------------
Verdict strategy_corpus() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 1; i <= kBisimTerms && v.pass; ++i) {
        TermArena arena;
        NameSupply supply;
        const PositiveTerm* t =
            crumble(arena, corpus_lambda(arena, supply, i, kBisimMaxSize), supply);
        StrategyResult s = strategy_checks(arena, t, supply, 3);
        if (!s.pass) v.fail("seed " + std::to_string(i) + ": " + s.detail);
    }
    v.seconds = seconds_since(t0);
    return v;
}

// ---- criterion 7: state invariants over all corpus runs ----------------
Verdict invariant_suite() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 1; i <= kBisimTerms && v.pass; ++i) {
        TermArena arena;
        NameSupply supply;
        const PositiveTerm* t =
            crumble(arena, corpus_lambda(arena, supply, i, kBisimMaxSize), supply);
        CheckedRun cs = checked_sliced_run(arena, t, supply, kBisimPrincipalBudget);
        if (!cs.violations.empty()) {
            v.fail("seed " + std::to_string(i) + " (sliced): " + cs.violations.front());
            break;
        }
        CheckedRun cn = checked_natural_run(arena, t, supply, kBisimPrincipalBudget);
        if (!cn.violations.empty()) {
            v.fail("seed " + std::to_string(i) + " (natural): " + cn.violations.front());
        }
    }
    v.seconds = seconds_since(t0);
    return v;
}

// ---- criterion 8: transition-count and cost bounds ----------------------
Verdict bounds_suite() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    {
        TermArena arena;
        NameSupply supply;
        const PositiveTerm* t =
            crumble(arena, parse_lambda(kWorkedLambda, arena, supply), supply);
        RunReport r = sliced_run(arena, t, supply, 100);
        v.require(r.counts.e == 1 && r.counts.m == 3 && r.counts.sea3 == 3,
                  "worked example counts are not e=1, m=3, sea3=3");
        BoundsResult b = check_bounds(r);
        v.require(b.pass, b.pass ? "" : "worked example: " + b.violations.front());
    }
    for (std::size_t i = 1; i <= kBisimTerms && v.pass; ++i) {
        TermArena arena;
        NameSupply supply;
        const PositiveTerm* t =
            crumble(arena, corpus_lambda(arena, supply, i, kBisimMaxSize), supply);
        BoundsResult b = check_bounds(sliced_run(arena, t, supply, kBisimPrincipalBudget));
        if (!b.pass) v.fail("seed " + std::to_string(i) + ": " + b.violations.front());
    }
    v.seconds = seconds_since(t0);
    return v;
}

// ---- criterion 9: quadratic vs bi-linear scaling ------------------------
Verdict scaling_separation() {
    Verdict v;
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t = gen_tau3_loop(arena, supply);

    auto t0 = std::chrono::steady_clock::now();
    ScalingReport rep = scaling_experiment(arena, t, supply, {64, 128, 256, 512});
    RunReport nat512 = natural_run(arena, t, supply, 512);
    RunReport sl512 = sliced_run(arena, t, supply, 512);
    v.seconds = seconds_since(t0);

    v.require(rep.natural_ratios.size() == 3, "missing scaling rows");
    if (v.pass) {
        double nr = rep.natural_ratios.back();
        v.require(nr > kNaturalRatioLo && nr < kNaturalRatioHi,
                  "natural doubling ratio " + std::to_string(nr) + " outside band");
        for (double sr : rep.sliced_ratios) {
            v.require(sr > kSlicedRatioLo && sr < kSlicedRatioHi,
                      "sliced doubling ratio " + std::to_string(sr) + " outside band");
        }
    }
    std::size_t max_nat_m = 0;
    for (const StepInfo& s : nat512.cost_samples)
        if (s.label == Label::m && s.cost > max_nat_m) max_nat_m = s.cost;
    v.require(max_nat_m > 10 * t->size,
              "natural per-step renaming stayed within 10x the input size");
    for (const StepInfo& s : sl512.cost_samples) {
        if (s.label == Label::m && s.cost > t->size) {
            v.fail("sliced renaming cost " + std::to_string(s.cost) +
                   " exceeds the input size");
            break;
        }
    }
    v.require(v.seconds < kScalingBudgetS, "experiment exceeded the time budget");
    return v;
}

// ---- criterion 10: unfold after crumble is the identity -----------------
Verdict round_trip() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    std::size_t overflows = 0;
    for (std::size_t i = 1; i <= kRoundTripTerms && v.pass; ++i) {
        TermArena arena;
        NameSupply supply;
        const LambdaTerm* l = corpus_lambda(arena, supply, i, kRoundTripMaxSize);
        const PositiveTerm* t = crumble(arena, l, supply);
        try {
            const LambdaTerm* back = unfold(arena, t, supply);
            if (!alpha_eq(back, l))
                v.fail("seed " + std::to_string(i) + ": round trip not alpha-equal");
        } catch (const UnfoldOverflow&) {
            ++overflows;  // guarded: sharing can make the unfolding huge
        }
    }
    v.require(overflows <= kRoundTripMaxOverflows,
              std::to_string(overflows) + " unfold overflows exceed the allowance");
    {
        TermArena arena;
        NameSupply supply;
        const PositiveTerm* t =
            crumble(arena, parse_lambda(kWorkedLambda, arena, supply), supply);
        const PositiveTerm* expect = parse_positive(
            "v4[v4 <- (\\v1.v5[v5 <- v1 v1]) v6][v6 <- (\\v2.v2) v7][v7 <- \\v3.v3]",
            arena, supply);
        v.require(alpha_eq(t, expect) && t->size == 11,
                  "worked example does not crumble to the expected term");
    }
    v.seconds = seconds_since(t0);
    v.require(v.seconds < kRoundTripBudgetS, "corpus exceeded the time budget");
    return v;
}

}  // namespace

int main() {
    struct Row {
        const char* name;
        Verdict (*fn)();
    };
    const Row rows[] = {
        {"golden sliced trace on the worked example", golden_sliced_trace},
        {"natural machine prefix on the self-replicating term", natural_prefix},
        {"machine-strategy bisimulation, 500 random terms, both machines",
         bisimulation_corpus},
        {"diamond property on the two-redex example and 300 random terms",
         diamond_property},
        {"right-context predicate agreement, exhaustive to 4 entries",
         predicate_agreement},
        {"right-strategy uniqueness and progress over the corpus", strategy_corpus},
        {"state invariants and final shapes over all corpus runs", invariant_suite},
        {"transition-count and cost bounds on every sliced run", bounds_suite},
        {"quadratic-vs-bilinear cost separation on the growing loop",
         scaling_separation},
        {"unfold after crumble is the identity on 1000 random terms", round_trip},
    };

    bool all = true;
    int idx = 0;
    for (const Row& row : rows) {
        Verdict v = row.fn();
        all = all && v.pass;
        std::printf("%s %2d  %-62s (%.3f s)\n", v.pass ? "PASS" : "FAIL", ++idx,
                    row.name, v.seconds);
        if (!v.pass) std::printf("        %s\n", v.detail.c_str());
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES PRESENT");
    return all ? 0 : 1;
}
