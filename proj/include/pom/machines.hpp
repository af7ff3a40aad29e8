// Two abstract machines for the right strategy on positive terms.
//
// The Natural machine keeps a right context of peeled entries and performs
// the full multiplicative rewrite on its active term, so its renaming scopes
// grow with the run. The Sliced machine splits the active term at every
// multiplicative step instead, parking the outer part on a slice stack and
// delaying the head substitution until the slice is popped; every renaming
// it performs then stays within sub-terms of the initial term.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pom/calculus.hpp"
#include "pom/syntax.hpp"

namespace pom {

constexpr bool is_principal(Label l) { return l == Label::m || l == Label::e; }
constexpr bool is_search(Label l) { return !is_principal(l); }

// One applied transition: its label and its scanned-size cost.
//   sea1/sea2: 1.   e: size of the copied abstraction.
//   m (Natural): size of the inner term plus size of the split body.
//   m (Sliced): size of the moved body.   sea3: size of the popped slice body.
struct StepInfo {
    Label label;
    std::size_t cost;
};

// ------------------------------------------------------------------
// Natural machine
// ------------------------------------------------------------------

struct NaturalState {
    const PositiveTerm* active = nullptr;
    OpenContext rctx;  // most recently peeled entry innermost
};

// Fresh well-bound copy of t with an empty right context.
NaturalState natural_init(TermArena& arena, const PositiveTerm* t, NameSupply& supply);

// Label of the transition that applies to s, nullopt when s is final
// (active is a bare variable). Does not mutate.
std::optional<Label> natural_peek(const NaturalState& s);

// Apply one transition in place. nullopt iff final.
std::optional<StepInfo> natural_step(TermArena& arena, NaturalState& s, NameSupply& supply);

// plug(rctx, active)
const PositiveTerm* natural_read_back(TermArena& arena, const NaturalState& s);

// ------------------------------------------------------------------
// Sliced machine
// ------------------------------------------------------------------

// Delayed substitutions, looked up by variable identity in constant time.
// Entries are never removed; the most recently pushed entry is the innermost
// one of the read-back context.
class Environment {
public:
    struct Entry {
        VarId binder;
        const Bite* bite;
    };

    void push(VarId binder, const Bite* bite) {
        index_[binder] = entries_.size();
        entries_.push_back({binder, bite});
    }
    const Bite* lookup(VarId y) const {
        auto it = index_.find(y);
        return it == index_.end() ? nullptr : entries_[it->second].bite;
    }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // Storage is oldest-first; iterate with rbegin/rend for most-recent-first.
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    auto rbegin() const { return entries_.rbegin(); }
    auto rend() const { return entries_.rend(); }

private:
    std::vector<Entry> entries_;
    std::unordered_map<VarId, std::size_t> index_;
};

// A delayed merge t[x <- .]: once the slice above reduces to a variable z,
// the machine resumes with t{x <- z}.
struct Slice {
    const PositiveTerm* body;
    VarId binder;
};

struct SlicedState {
    std::vector<Slice> stack;  // back = top (innermost slice)
    const PositiveTerm* active = nullptr;
    Environment env;
};

// (empty stack, fresh well-bound copy of t, empty environment)
SlicedState sliced_init(TermArena& arena, const PositiveTerm* t, NameSupply& supply);

// Label of the transition that applies to s; nullopt when final (active is a
// bare variable and the stack is empty). At most one transition ever applies.
std::optional<Label> sliced_peek(const SlicedState& s);

// Apply one transition in place. nullopt iff final.
std::optional<StepInfo> sliced_step(TermArena& arena, SlicedState& s, NameSupply& supply);

// Environment as an open context, most recent entry innermost.
OpenContext read_back_env(const Environment& env);

// Decode a state to the positive term it represents: merge slices into the
// active term at its head variable (top slice first), then wrap with the
// environment context. Total on arbitrary states.
const PositiveTerm* read_back(TermArena& arena, const SlicedState& s,
                              NameSupply* supply = nullptr);

// ------------------------------------------------------------------
// Runs
// ------------------------------------------------------------------

enum class RunStatus { Normal, BudgetExhausted };

struct LabelCounts {
    std::size_t m = 0, e = 0, sea1 = 0, sea2 = 0, sea3 = 0;

    std::size_t& of(Label l) {
        switch (l) {
            case Label::m: return m;
            case Label::e: return e;
            case Label::sea1: return sea1;
            case Label::sea2: return sea2;
            default: return sea3;
        }
    }
    std::size_t of(Label l) const { return const_cast<LabelCounts*>(this)->of(l); }
    std::size_t total() const { return m + e + sea1 + sea2 + sea3; }
    std::size_t principal() const { return m + e; }
};

struct RunReport {
    LabelCounts counts;
    std::vector<StepInfo> cost_samples;  // one per transition, in order
    RunStatus status = RunStatus::Normal;
    std::size_t initial_size = 0;
    // Exactly one of these is engaged, matching the machine that ran.
    std::optional<NaturalState> final_natural;
    std::optional<SlicedState> final_sliced;

    // Cumulative principal cost (m + e samples), the scaling signal.
    std::size_t principal_cost() const {
        std::size_t c = 0;
        for (const StepInfo& s : cost_samples)
            if (is_principal(s.label)) c += s.cost;
        return c;
    }
};

// Run until final or until `budget` principal transitions have fired;
// trailing search transitions after the last in-budget principal one are
// executed to quiescence before reporting.
RunReport natural_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                      std::size_t budget);
RunReport sliced_run(TermArena& arena, const PositiveTerm* t, NameSupply& supply,
                     std::size_t budget);

// ------------------------------------------------------------------
// State invariants
// ------------------------------------------------------------------

// Diagnostic check of a Sliced state; returns the violated clauses
// (empty = pass):
//   (a) the environment read-back is a right context;
//   (b) binders across stack, active and environment are pairwise distinct,
//       every environment binder occurs only inward of its own entry, and no
//       slice binder occurs above its slice (later slices, active,
//       environment);
//   (c) every component (active, slice bodies, environment bites) has size
//       <= initial_size — the active term is exempt right after an
//       exponential transition (after_e).
std::vector<std::string> check_state_invariants(const SlicedState& s,
                                                std::size_t initial_size, bool after_e,
                                                const NameSupply& supply);

// Natural-machine counterpart: right-context rctx, distinct binders, entry
// locality. (No size clause: the Natural machine's active term may grow.)
std::vector<std::string> check_state_invariants(const NaturalState& s,
                                                const NameSupply& supply);

// ------------------------------------------------------------------
// Traces
// ------------------------------------------------------------------

// `<label> | <stack, outermost-first> | <active> | <env, most-recent-first>`
// with ε marking the empty end of the stack and environment.
std::string trace_line(const SlicedState& s, std::string_view label,
                       const NameSupply& supply);

// `<label> | <active> | <rctx, innermost-first>`
std::string trace_line(const NaturalState& s, std::string_view label,
                       const NameSupply& supply);

}  // namespace pom
