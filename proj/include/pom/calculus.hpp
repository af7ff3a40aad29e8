// Rewriting theory of the positive calculus: open contexts (stacks of
// substitution entries around a hole), the two root rewrite rules, redex
// enumeration, right-context predicates, and the right evaluation strategy.
#pragma once

#include "pom/syntax.hpp"

#include <optional>

namespace pom {

// ------------------------------------------------------------------
// labels
// ------------------------------------------------------------------

enum class Label : std::uint8_t { m, e, sea1, sea2, sea3 };

inline const char* label_name(Label l) {
    switch (l) {
        case Label::m: return "m";
        case Label::e: return "e";
        case Label::sea1: return "sea1";
        case Label::sea2: return "sea2";
        case Label::sea3: return "sea3";
    }
    return "?";
}

// ------------------------------------------------------------------
// open contexts
// ------------------------------------------------------------------

// O ::= <.> | O[x <- b], a hole under a stack of entries. Entries are kept in
// sequence (= textual) order: entries[0] is the bracket adjacent to the hole
// and entries.back() is the root of the plugged term, so that
//   plug(O, t) = ((t[x0 <- b0]) ... )[xn-1 <- bn-1].
// append_root/pop_root operate on the root end in O(1).
class OpenContext {
public:
    struct Entry {
        VarId binder;
        const Bite* bite;
    };

    OpenContext() = default;

    void append_root(VarId binder, const Bite* bite) { entries_.push_back({binder, bite}); }
    void push_innermost(VarId binder, const Bite* bite) {
        entries_.insert(entries_.begin(), {binder, bite});
    }
    void pop_root() { entries_.pop_back(); }
    void clear() { entries_.clear(); }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    const Entry& innermost() const { return entries_.front(); }
    const Entry& root() const { return entries_.back(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::vector<Entry> entries_;
};

// Binders of the context, in sequence order (duplicates kept if present).
std::vector<VarId> ctx_dom(const OpenContext& O);

// Bite of the entry binding y whose scope contains the hole — the first
// binder outward from the hole, i.e. the innermost on non-well-bound inputs.
// nullptr when y is not in dom(O).
const Bite* ctx_lookup(const OpenContext& O, VarId y);

// O<t>: wrap t in the context's entries (capturing; no renaming).
const PositiveTerm* plug(TermArena& arena, const OpenContext& O, const PositiveTerm* t);

// Applied free variables of the context, anchored at the hole: fold from the
// hole toward the root with s = {} and
//   [x <- y z]    : s = (s \ {x}) u {y}
//   [x <- \y.u]   : s = s \ {x}
//   [x <- (\y.u)z]: s = s \ {x}
// Sorted ascending.
std::vector<VarId> afv(const OpenContext& O);

// Right contexts, two provably-coincident characterizations:
//   is_right_oi: folding from the hole toward the root, an abstraction entry
//     [x <- \y.u] is admissible only when x is not in the afv of the part
//     between it and the hole; variable applications always are; redex
//     entries never are.
//   is_right_io: walking from the root toward the hole with an innermost-wins
//     binder map R, a variable application [x <- y z] is admissible only when
//     R(y) is not an abstraction; abstraction entries always are; redex
//     entries never are.
bool is_right_oi(const OpenContext& O);
bool is_right_io(const OpenContext& O);

// Split a term into its full spine context and head variable: t = O<x>,
// the unique such decomposition.
std::pair<OpenContext, VarId> head_split(const PositiveTerm* t);

// ------------------------------------------------------------------
// redexes and root rules
// ------------------------------------------------------------------

// A redex of a term t, ready to fire.
//   m: the entry at sequence index pos carries a redex bite (\y.u) z.
//   e: the entry at pos carries a variable application y z whose first binder
//      outward is an abstraction entry at abs_pos (> pos), not shadowed in
//      between; abs_bite is that abstraction.
// position is the surrounding context: every entry strictly outside pos.
// reduct is the whole-term result of firing the redex in place.
struct Redex {
    Label label;                 // Label::m or Label::e
    std::size_t pos = 0;         // sequence index (0 = bracket next to the head)
    std::size_t abs_pos = 0;     // e only
    const Bite* abs_bite = nullptr;  // e only
    OpenContext position;
    const PositiveTerm* reduct = nullptr;
};

// All redexes of t with their positions and reducts, ordered by pos ascending
// (innermost first). Fresh names for e-copies come from `supply`.
std::vector<Redex> enumerate_redexes(TermArena& arena, const PositiveTerm* t,
                                     NameSupply& supply);

// True iff t has no redex at all. Single scan, no allocation of reducts.
bool is_normal(const PositiveTerm* t);

// Root multiplicative rule on t[x <- (\y.O<w>) z] given decomposed:
//   t[x <- (\y.O<w>) z]  ->  O< t{x <- w} >{y <- z}
// `abs` must be a redex bite.
const PositiveTerm* root_m(TermArena& arena, const PositiveTerm* t, VarId x, const Bite* abs,
                           NameSupply* supply = nullptr);

// Root exponential rule on O< t[x <- y z] >[y <- \w.u] given decomposed
// (abs = \w.u must be an abstraction bite, y not in dom(O)):
//   O< t[x <- y z] >[y <- \w.u]  ->  O< t[x <- (\w.u)^a z] >[y <- \w.u]
// where (\w.u)^a is a fresh-binder copy taken from `supply`.
const PositiveTerm* root_e(TermArena& arena, const PositiveTerm* t, const OpenContext& O,
                           VarId x, VarId y, VarId z, const Bite* abs, NameSupply& supply);

// ------------------------------------------------------------------
// right strategy
// ------------------------------------------------------------------

// The unique redex of t whose position is a right context (nullopt iff t is
// normal). Single root-to-hole scan; agrees with filtering enumerate_redexes
// through is_right_oi on positions.
std::optional<Redex> right_redex(TermArena& arena, const PositiveTerm* t, NameSupply& supply);

// Fire the right redex: the reduct and its label (nullopt iff t is normal).
struct RightStep {
    Label label;
    const PositiveTerm* term;  // the reduct
    Redex redex;
};
std::optional<RightStep> right_step(TermArena& arena, const PositiveTerm* t, NameSupply& supply);

struct RightEvalResult {
    const PositiveTerm* term;  // last term reached
    std::vector<std::pair<Label, const PositiveTerm*>> steps;  // (label, reduct) per step
    std::size_t m_count = 0;
    std::size_t e_count = 0;
    bool normal = false;  // false iff the step budget ran out first
};

// Iterate right_step at most `budget` times.
RightEvalResult right_eval(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                           std::size_t budget);

}  // namespace pom
