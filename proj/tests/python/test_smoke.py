"""Smoke tests for the Python bindings.

The heavy property/acceptance testing lives in the C++ suites; these checks
pin the binding surface: every exposed operation round-trips strings, the
worked examples produce their known outputs, and errors surface as the right
Python exception types.
"""

import pytest

import pom

WORKED_LAMBDA = r"(\x.x x) ((\z.z) (\z.z))"
WORKED_CRUMBLE = r"v4[v4 <- (\v1.v5[v5 <- v1 v1]) v6][v6 <- (\v2.v2) v7][v7 <- \v3.v3]"
TWO_REDEXES = r"z[x <- y y][z <- (\w.w) p][y <- \q.q]"
OMEGA = r"x[x <- y y][y <- \z.w[w <- z z]]"


def test_crumble_worked_example():
    assert pom.crumble(WORKED_LAMBDA) == WORKED_CRUMBLE
    # Module-level helpers use a fresh Session per call, so they are
    # deterministic down to the fresh names.
    assert pom.crumble(WORKED_LAMBDA) == pom.crumble(WORKED_LAMBDA)


def test_unfold_inverts_crumble():
    s = pom.Session()
    assert s.alpha_eq(s.unfold(s.crumble(WORKED_LAMBDA)), WORKED_LAMBDA)
    assert s.alpha_eq(s.unfold(OMEGA, node_budget=50), r"(\z.z z) (\z.z z)")


def test_unfold_overflow():
    with pytest.raises(pom.UnfoldOverflow, match="unfold overflow"):
        pom.unfold(WORKED_CRUMBLE, node_budget=5)
    assert issubclass(pom.UnfoldOverflow, RuntimeError)


def test_parse_error():
    with pytest.raises(pom.ParseError, match="parse error"):
        pom.crumble(r"(\x.")
    with pytest.raises(pom.ParseError):
        pom.eval("t[x <- y y")  # unclosed substitution bracket
    assert issubclass(pom.ParseError, ValueError)


def test_eval_two_redexes():
    r = pom.eval(TWO_REDEXES)
    assert r["normal"] is True
    assert [s["label"] for s in r["steps"]] == ["m", "e", "m"]
    assert (r["m"], r["e"]) == (2, 1)
    assert pom.alpha_eq(r["term"], r"p[y <- \q.q]")
    # The final term is its own normal form.
    again = pom.eval(r["term"])
    assert again["steps"] == [] and again["normal"] is True


def test_eval_budget():
    r = pom.eval(OMEGA, max_steps=4)
    assert r["normal"] is False
    assert len(r["steps"]) == 4


def test_run_sliced_metrics():
    d = pom.run(WORKED_LAMBDA, machine="sliced")
    assert d["machine"] == "sliced"
    assert d["status"] == "normal"
    assert d["term_size"] == 11
    assert d["counts"] == {"m": 3, "e": 1, "sea1": 1, "sea2": 0, "sea3": 3}
    assert d["cost"] == {"rename": 13, "copy": 2, "search": 1, "total": 16}
    assert pom.alpha_eq(d["readback"], r"w[w <- \u.u]")


def test_run_natural_budget():
    d = pom.run(OMEGA, machine="natural", max_steps=5)
    assert d["status"] == "budget_exhausted"
    assert d["counts"]["m"] + d["counts"]["e"] == 5
    # Search work is bounded even on a diverging term.
    assert d["cost"]["total"] >= d["cost"]["rename"] + d["cost"]["copy"]


def test_machines_agree_on_readback():
    for machine in ("natural", "sliced"):
        d = pom.run(TWO_REDEXES, machine=machine, max_steps=100)
        assert d["status"] == "normal"
        assert pom.alpha_eq(d["readback"], r"p[y <- \q.q]")
    with pytest.raises(ValueError):
        pom.run(TWO_REDEXES, machine="lazy")


def test_size_and_alpha_eq():
    s = pom.Session()
    assert s.size(TWO_REDEXES) == 8
    assert s.size(WORKED_CRUMBLE) == 11
    assert s.size("x") == 1
    assert s.alpha_eq(r"\a.a", r"\b.b")
    assert not s.alpha_eq(r"\a.a", r"\b.b b")
    assert not s.alpha_eq("x", "y")  # free variables compare by name


def test_parse_modes():
    s = pom.Session()
    # Autodetection: an explicit substitution marks positive syntax.
    assert s.parse("x[x <- y z]") == "x[x <- y z]"
    # Lambda input is translated; forcing positive=False on lambda text too.
    assert s.alpha_eq(s.parse("y z", positive=False), "w[w <- y z]")
    # Forcing the positive reading on lambda-only text is a parse error.
    with pytest.raises(pom.ParseError):
        s.parse(r"\x.x", positive=True)


def test_session_supply_is_stateful():
    s = pom.Session()
    first = s.crumble(WORKED_LAMBDA)
    second = s.crumble(WORKED_LAMBDA)
    assert first == WORKED_CRUMBLE
    assert first != second  # fresh names advance within one Session
    assert s.alpha_eq(first, second)
