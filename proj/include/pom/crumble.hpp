// Translation of plain lambda-terms into positive terms, and the unfolding
// oracle (full ES elimination by meta-level substitution) used to validate it.
#pragma once

#include "pom/calculus.hpp"
#include "pom/syntax.hpp"

namespace pom {

// Translate a lambda-term into a well-bound positive term.
//
// Scheme (head, spine), with the spine kept in sequence order:
//   c(x)     = (x, empty)
//   c(\x.s)  = inlined on the function side of an application; shared via a
//              fresh ES [v <- \x.C(s)] everywhere else (argument side, top).
//   c(t u)   = allocate fresh w first; translate the function side (inlining
//              an abstraction into the bite, otherwise forcing a variable
//              head y with spine S_t); translate the argument side to a
//              variable head h with spine S_u; the bite is (\x.C(s)) h or
//              y h; result is (w, [w <- bite] ++ S_t ++ S_u).
// The argument spine thus sits at the root end, so root-first machine
// consumption evaluates arguments before functions.
//
// All binders are first renamed to fresh ids in leftmost-outermost order;
// binders and then translation variables take display names v1, v2, ... in
// allocation order (deduplicated by the supply if taken).
const PositiveTerm* crumble(TermArena& arena, const LambdaTerm* t, NameSupply& supply);

// Eliminate every explicit substitution by capture-avoiding meta-level
// substitution: t[x <- b] unfolds to unfold(t){x <- unfold(b)}.
//
// Unfolding can blow up exponentially; the oracle throws UnfoldOverflow
// ("unfold overflow") once it has built more than `node_budget` nodes (or
// nests deeper than an internal recursion guard).
const LambdaTerm* unfold(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                         std::size_t node_budget = 1'000'000);

}  // namespace pom
