#include <doctest.h>

#include <string>
#include <vector>

#include "pom/crumble.hpp"
#include "pom/machines.hpp"
#include "pom/syntax.hpp"

using namespace pom;

namespace {

constexpr const char* kWorkedLambda = "(\\x.x x) ((\\z.z) (\\z.z))";
constexpr const char* kOmegaPositive = "x[x <- y y][y <- \\z.w[w <- z z]]";
constexpr const char* kTau3Loop =
    "x[x <- y z][z <- y y][y <- \\y.x[x <- y z][z <- y y]]";

std::vector<Label> labels_of(const RunReport& r) {
    std::vector<Label> out;
    for (const StepInfo& s : r.cost_samples) out.push_back(s.label);
    return out;
}

}  // namespace

TEST_CASE("natural machine: bare variable is final and decodes to itself") {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t = parse_positive("x", arena, supply);
    NaturalState s = natural_init(arena, t, supply);
    CHECK(!natural_peek(s).has_value());
    CHECK(!natural_step(arena, s, supply).has_value());
    CHECK(alpha_eq(natural_read_back(arena, s), t));

    RunReport r = natural_run(arena, t, supply, 10);
    CHECK(r.status == RunStatus::Normal);
    CHECK(r.counts.total() == 0);
}

TEST_CASE("natural machine: looping-term prefix is sea1, e, m and recurs") {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* omega = parse_positive(kOmegaPositive, arena, supply);

    NaturalState s = natural_init(arena, omega, supply);
    CHECK(alpha_eq(natural_read_back(arena, s), omega));

    auto s1 = natural_step(arena, s, supply);
    REQUIRE(s1.has_value());
    CHECK(s1->label == Label::sea1);
    CHECK(s1->cost == 1);
    CHECK(s.rctx.size() == 1);
    CHECK(s.rctx.root().bite->kind == Bite::Kind::Abs);

    auto s2 = natural_step(arena, s, supply);
    REQUIRE(s2.has_value());
    CHECK(s2->label == Label::e);
    CHECK(s2->cost == 4);  // size of the copied abstraction
    CHECK(s.active->bite->kind == Bite::Kind::RedexApp);

    auto s3 = natural_step(arena, s, supply);
    REQUIRE(s3.has_value());
    CHECK(s3->label == Label::m);
    CHECK(s3->cost == 4);  // inner term (1) + split body (3)

    // Active is now w'[w' <- y y] up to naming: one entry, a self-application
    // of the variable bound by the context.
    REQUIRE(s.active->kind == PositiveTerm::Kind::ES);
    CHECK(s.active->body->kind == PositiveTerm::Kind::Var);
    CHECK(s.active->bite->kind == Bite::Kind::VarApp);
    CHECK(s.active->bite->u == s.active->bite->v);
    CHECK(s.active->bite->u == s.rctx.innermost().binder);
    // ... and the whole state decodes back to the initial term (period-2
    // alpha recurrence).
    CHECK(alpha_eq(natural_read_back(arena, s), omega));
}

TEST_CASE("natural machine: budget bounds principal transitions only") {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* omega = parse_positive(kOmegaPositive, arena, supply);
    RunReport r = natural_run(arena, omega, supply, 5);
    CHECK(r.status == RunStatus::BudgetExhausted);
    CHECK(r.counts.principal() == 5);
    CHECK(labels_of(r)[0] == Label::sea1);
    CHECK(r.initial_size == 7);
}

TEST_CASE("natural machine: terminating run retains the context for read-back") {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t = parse_positive("x[x <- \\w.w]", arena, supply);
    RunReport r = natural_run(arena, t, supply, 10);
    CHECK(r.status == RunStatus::Normal);
    CHECK(r.counts.sea1 == 1);
    CHECK(r.counts.total() == 1);
    REQUIRE(r.final_natural.has_value());
    CHECK(r.final_natural->active->kind == PositiveTerm::Kind::Var);
    CHECK(r.final_natural->rctx.size() == 1);
    CHECK(alpha_eq(natural_read_back(arena, *r.final_natural), t));
}

TEST_CASE("sliced machine: golden run of the worked example") {
    TermArena arena;
    NameSupply supply;
    const LambdaTerm* lam = parse_lambda(kWorkedLambda, arena, supply);
    const PositiveTerm* t = crumble(arena, lam, supply);
    REQUIRE(t->size == 11);

    RunReport r = sliced_run(arena, t, supply, 100);
    CHECK(r.status == RunStatus::Normal);
    CHECK(r.initial_size == 11);

    std::vector<Label> expected = {Label::sea1, Label::m, Label::sea3, Label::m,
                                   Label::e,    Label::m, Label::sea3, Label::sea3};
    CHECK(labels_of(r) == expected);
    CHECK(r.counts.m == 3);
    CHECK(r.counts.e == 1);
    CHECK(r.counts.sea1 == 1);
    CHECK(r.counts.sea2 == 0);
    CHECK(r.counts.sea3 == 3);

    std::vector<std::size_t> costs;
    for (const StepInfo& s : r.cost_samples) costs.push_back(s.cost);
    CHECK(costs == std::vector<std::size_t>{1, 1, 6, 3, 2, 1, 1, 1});
    for (const StepInfo& s : r.cost_samples) {
        if (s.label != Label::sea1 && s.label != Label::sea2) {
            CHECK(s.cost <= r.initial_size);
        }
    }

    // Final state shape: (empty stack, bare variable, one-entry environment
    // holding an identity abstraction).
    REQUIRE(r.final_sliced.has_value());
    const SlicedState& f = *r.final_sliced;
    CHECK(f.stack.empty());
    CHECK(f.active->kind == PositiveTerm::Kind::Var);
    REQUIRE(f.env.size() == 1);
    CHECK(f.env.begin()->bite->kind == Bite::Kind::Abs);
    CHECK(f.env.begin()->bite->size == 2);
    CHECK(f.env.begin()->binder == f.active->var);

    TermArena arena2;
    NameSupply supply2;
    const PositiveTerm* expected_final = parse_positive("w[w <- \\u.u]", arena2, supply2);
    CHECK(alpha_eq(read_back(arena, f, &supply), expected_final));
}

TEST_CASE("sliced machine: lockstep with the right strategy on the worked example") {
    TermArena arena;
    NameSupply supply;
    const LambdaTerm* lam = parse_lambda(kWorkedLambda, arena, supply);
    const PositiveTerm* t = crumble(arena, lam, supply);

    SlicedState s = sliced_init(arena, t, supply);
    const PositiveTerm* shadow = read_back(arena, s, &supply);
    CHECK(alpha_eq(shadow, t));

    while (auto info = sliced_step(arena, s, supply)) {
        const PositiveTerm* now = read_back(arena, s, &supply);
        if (is_principal(info->label)) {
            auto step = right_step(arena, shadow, supply);
            REQUIRE(step.has_value());
            CHECK(step->label == info->label);
            CHECK(alpha_eq(step->term, now));
            shadow = step->term;
        } else {
            CHECK(alpha_eq(now, shadow));
        }
    }
    CHECK(is_normal(shadow));
}

TEST_CASE("sliced machine: slice head can change before the pop") {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* t =
        parse_positive("t[x <- (\\y.z[z <- (\\a.a) u]) w]", arena, supply);
    VarId u_id = supply.intern("u");

    SlicedState s = sliced_init(arena, t, supply);
    auto i1 = sliced_step(arena, s, supply);
    auto i2 = sliced_step(arena, s, supply);
    auto i3 = sliced_step(arena, s, supply);
    REQUIRE(i1.has_value());
    REQUIRE(i2.has_value());
    REQUIRE(i3.has_value());
    CHECK(i1->label == Label::m);
    CHECK(i2->label == Label::m);
    CHECK(i3->label == Label::sea3);

    // (ε : t[x <- ·], u, ε): the inner slice popped with head u, not z.
    CHECK(s.stack.size() == 1);
    REQUIRE(s.active->kind == PositiveTerm::Kind::Var);
    CHECK(s.active->var == u_id);
    CHECK(s.env.empty());
    CHECK(to_string(s.stack[0].body, supply) == "t");
    CHECK(to_string(read_back(arena, s, &supply), supply) == "t");
}

TEST_CASE("environment read-back puts the most recent entry innermost") {
    TermArena arena;
    NameSupply supply;
    VarId x = supply.fresh("x");
    VarId y = supply.fresh("y");
    VarId z = supply.fresh("z");

    Environment env;
    env.push(y, arena.var_app(z, z));
    env.push(x, arena.var_app(y, z));
    CHECK(env.lookup(x) != nullptr);
    CHECK(env.lookup(y) != nullptr);
    CHECK(env.lookup(z) == nullptr);

    OpenContext O = read_back_env(env);
    REQUIRE(O.size() == 2);
    CHECK(O.innermost().binder == x);
    CHECK(O.root().binder == y);

    SlicedState s;
    s.active = arena.pvar(x);
    s.env.push(x, arena.var_app(y, z));
    CHECK(to_string(read_back(arena, s, &supply), supply) == "x[x <- y z]");
}

TEST_CASE("sliced machine: budget semantics and trivial runs") {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* omega = parse_positive(kOmegaPositive, arena, supply);
    RunReport r = sliced_run(arena, omega, supply, 5);
    CHECK(r.status == RunStatus::BudgetExhausted);
    CHECK(r.counts.principal() == 5);

    const PositiveTerm* x = parse_positive("x", arena, supply);
    RunReport rx = sliced_run(arena, x, supply, 10);
    CHECK(rx.status == RunStatus::Normal);
    CHECK(rx.counts.total() == 0);

    const PositiveTerm* loop = parse_positive(kTau3Loop, arena, supply);
    RunReport r0 = sliced_run(arena, loop, supply, 0);
    CHECK(r0.status == RunStatus::BudgetExhausted);
    CHECK(r0.counts.principal() == 0);
    CHECK(r0.principal_cost() == 0);
    CHECK(r0.counts.sea1 == 1);  // trailing searches before the first principal
}

TEST_CASE("per-step costs: natural renaming scopes grow, sliced stay bounded") {
    TermArena arena;
    NameSupply supply;
    const PositiveTerm* loop = parse_positive(kTau3Loop, arena, supply);
    REQUIRE(loop->size == 11);

    RunReport nat = natural_run(arena, loop, supply, 16);
    std::vector<std::size_t> m_costs;
    for (const StepInfo& s : nat.cost_samples) {
        if (s.label == Label::m) m_costs.push_back(s.cost);
    }
    REQUIRE(m_costs.size() >= 3);
    for (std::size_t i = 1; i < m_costs.size(); ++i) {
        CHECK(m_costs[i] > m_costs[i - 1]);
    }
    CHECK(m_costs[2] > m_costs[0]);

    RunReport sl = sliced_run(arena, loop, supply, 16);
    for (const StepInfo& s : sl.cost_samples) {
        if (s.label == Label::m || s.label == Label::e || s.label == Label::sea3) {
            CHECK(s.cost <= sl.initial_size);
        }
    }
}

TEST_CASE("state invariants hold along the golden run") {
    TermArena arena;
    NameSupply supply;
    const LambdaTerm* lam = parse_lambda(kWorkedLambda, arena, supply);
    const PositiveTerm* t = crumble(arena, lam, supply);

    SlicedState s = sliced_init(arena, t, supply);
    CHECK(check_state_invariants(s, t->size, false, supply).empty());
    bool after_e = false;
    while (auto info = sliced_step(arena, s, supply)) {
        after_e = info->label == Label::e;
        auto bad = check_state_invariants(s, t->size, after_e, supply);
        CAPTURE(label_name(info->label));
        CHECK(bad.empty());
    }

    const PositiveTerm* omega = parse_positive(kOmegaPositive, arena, supply);
    NaturalState n = natural_init(arena, omega, supply);
    CHECK(check_state_invariants(n, supply).empty());
    for (int i = 0; i < 10; ++i) {
        natural_step(arena, n, supply);
        CHECK(check_state_invariants(n, supply).empty());
    }
}

TEST_CASE("state invariant checker flags each clause") {
    TermArena arena;
    NameSupply supply;

    // Size clause and the after-e exemption.
    SlicedState s;
    s.active = parse_positive("x[x <- (\\w.w) y]", arena, supply);
    REQUIRE(s.active->size == 4);
    CHECK(check_state_invariants(s, 3, true, supply).empty());
    auto bad = check_state_invariants(s, 3, false, supply);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "active term exceeds the initial size");

    // Environment locality: a binder occurring in its own bite.
    VarId p = supply.fresh("p");
    VarId q = supply.fresh("q");
    SlicedState s2;
    s2.active = arena.pvar(q);
    s2.env.push(p, arena.var_app(p, q));
    bad = check_state_invariants(s2, 10, false, supply);
    REQUIRE(!bad.empty());
    CHECK(bad[0].find("occurs at or outside its own entry") != std::string::npos);

    // Right-context clause: an applied variable bound by an outer
    // abstraction entry.
    VarId a = supply.fresh("a");
    VarId b = supply.fresh("b");
    VarId c = supply.fresh("c");
    SlicedState s3;
    s3.active = arena.pvar(c);
    s3.env.push(b, arena.abs(supply.fresh("w"), arena.pvar(c)));
    s3.env.push(a, arena.var_app(b, c));  // most recent: [a <- b c] inside [b <- \w.c]
    bad = check_state_invariants(s3, 10, false, supply);
    REQUIRE(!bad.empty());
    CHECK(bad[0] == "environment read-back is not a right context");

    // Duplicate binders across components.
    SlicedState s4;
    s4.active = arena.pvar(a);
    s4.env.push(a, arena.var_app(b, c));
    s4.stack.push_back({arena.pvar(b), a});
    bad = check_state_invariants(s4, 10, false, supply);
    bool has_dup = false;
    for (const std::string& m : bad) has_dup |= m.find("duplicate binder") == 0;
    CHECK(has_dup);

    // Slice scoping: the slice binder occurring above its slice.
    VarId r1 = supply.fresh("r");
    SlicedState s5;
    s5.stack.push_back({arena.pvar(a), r1});
    s5.active = arena.pvar(r1);
    bad = check_state_invariants(s5, 10, false, supply);
    REQUIRE(!bad.empty());
    bool has_leak = false;
    for (const std::string& m : bad) has_leak |= m.find("occurs above its slice") != std::string::npos;
    CHECK(has_leak);
}

TEST_CASE("trace lines match the tabular layout") {
    TermArena arena;
    NameSupply supply;

    SlicedState s;
    s.active = parse_positive("x[x <- y y]", arena, supply);
    CHECK(trace_line(s, "init", supply) == "init | ε | x[x <- y y] | ε");

    VarId y = supply.intern("y");
    VarId z = supply.fresh("z");
    VarId q = supply.fresh("q");
    VarId w = supply.fresh("w");
    SlicedState s2;
    s2.stack.push_back({arena.pvar(z), z});
    s2.env.push(y, arena.abs(w, arena.pvar(w)));
    s2.active = arena.pvar(q);
    CHECK(trace_line(s2, "m", supply) == "m | ε : z[z <- ·] | q | [y <- \\w.w] : ε");

    NaturalState n;
    n.active = arena.pvar(q);
    n.rctx.push_innermost(y, arena.var_app(y, z));
    CHECK(trace_line(n, "e", supply) == "e | q | [y <- y z] : ε");
}
