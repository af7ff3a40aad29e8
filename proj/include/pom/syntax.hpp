// Terms of the positive lambda-calculus and of the plain lambda-calculus:
// arena-allocated immutable nodes, variable identity by integer id, display
// names kept separately in the NameSupply. The positive calculus has
//   terms  t ::= x | t[x <- b]
//   bites  b ::= y z | \y.u | (\y.u) z
// where t[x <- b] binds x in t only, and every term is a head variable under
// a stack of explicit substitutions.
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pom {

// ------------------------------------------------------------------
// variables and names
// ------------------------------------------------------------------

using VarId = std::uint32_t;

// Issues fresh variable ids (strictly increasing) and remembers a unique
// rendered name per id. Distinct ids always render to distinct names, so
// printed terms are capture-faithful. Single-owner: not thread-safe; use one
// supply per independent task.
class NameSupply {
public:
    explicit NameSupply(VarId first = 1) : next_(first) {}

    // Fresh id; `hint` is the preferred display name (deduplicated with
    // primes). An empty hint renders as v<id>.
    VarId fresh(std::string_view hint = {});

    // Id for a free-variable name: the id already rendering as `name` if any,
    // otherwise a fresh one. Keeps free names stable across parses, so
    // parse/print round-trips within one supply are alpha-equal.
    VarId intern(std::string_view name);

    // Guarantees the next fresh id is > id (used before alpha-copying terms
    // that were built elsewhere).
    void ensure_above(VarId id) {
        if (id >= next_) next_ = id + 1;
    }

    VarId peek_next() const { return next_; }

    // Rendered name of an id. Ids this supply issued use their recorded
    // unique name; unknown ids fall back to v<id> (deduplicated on demand).
    std::string name_of(VarId id) const;

private:
    VarId next_;
    std::unordered_map<VarId, std::string> names_;
    std::unordered_map<std::string, VarId> used_;
};

// ------------------------------------------------------------------
// term nodes
// ------------------------------------------------------------------

struct LambdaTerm {
    enum class Kind : std::uint8_t { Var, Abs, App };
    Kind kind;
    VarId var = 0;                   // Var: the variable; Abs: the binder
    const LambdaTerm* a = nullptr;   // Abs: body; App: function
    const LambdaTerm* b = nullptr;   // App: argument
    std::uint32_t n_nodes = 1;       // node count (generator size measure)
    std::uint64_t hash = 0;          // structural, ids taken literally
};

struct PositiveTerm;

struct Bite {
    enum class Kind : std::uint8_t { VarApp, Abs, RedexApp };
    Kind kind;
    VarId u = 0;                       // VarApp: applied variable y; Abs/RedexApp: binder
    VarId v = 0;                       // VarApp: argument z; RedexApp: argument z
    const PositiveTerm* body = nullptr;  // Abs/RedexApp: abstraction body
    std::uint32_t size = 0;            // |y z| = 2, |\y.u| = 1+|u|, |(\y.u) z| = 2+|u|
    std::uint64_t hash = 0;
};

struct PositiveTerm {
    enum class Kind : std::uint8_t { Var, ES };
    Kind kind;
    VarId var = 0;                      // Var: the variable; ES: the binder x
    const PositiveTerm* body = nullptr; // ES: t in t[x <- b]
    const Bite* bite = nullptr;         // ES: b in t[x <- b]
    std::uint32_t size = 1;             // |x| = 1, |t[x <- b]| = |t| + |b|
    std::uint64_t hash = 0;
};

// Owns term nodes; pointers stay valid for the arena's lifetime and nodes are
// freed in bulk when it dies. Terms are immutable once built, so sharing
// subterms across terms in the same arena is free and safe.
class TermArena {
public:
    TermArena() = default;
    TermArena(const TermArena&) = delete;
    TermArena& operator=(const TermArena&) = delete;

    const LambdaTerm* lvar(VarId x);
    const LambdaTerm* labs(VarId binder, const LambdaTerm* body);
    const LambdaTerm* lapp(const LambdaTerm* fn, const LambdaTerm* arg);

    const PositiveTerm* pvar(VarId x);
    // t[x <- b]
    const PositiveTerm* es(const PositiveTerm* body, VarId binder, const Bite* bite);

    const Bite* var_app(VarId y, VarId z);
    const Bite* abs(VarId binder, const PositiveTerm* body);
    const Bite* redex_app(VarId binder, const PositiveTerm* body, VarId arg);

    std::size_t node_count() const {
        return lterms_.size() + pterms_.size() + bites_.size();
    }

private:
    std::deque<LambdaTerm> lterms_;   // deque: stable addresses under push_back
    std::deque<PositiveTerm> pterms_;
    std::deque<Bite> bites_;
};

// ------------------------------------------------------------------
// errors
// ------------------------------------------------------------------

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    int line;
    int col;
};

class UnfoldOverflow : public std::runtime_error {
public:
    explicit UnfoldOverflow(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------------------------------------------
// parsing and printing
// ------------------------------------------------------------------

// term ::= var | '\' var '.' term | term term | '(' term ')'
// Application associates left; an abstraction body extends as far right as
// possible. Variables match [a-zA-Z_][a-zA-Z0-9_']*; the lambda marker is
// '\' or the Unicode lambda.
const LambdaTerm* parse_lambda(std::string_view text, TermArena& arena, NameSupply& supply);

// pterm ::= var | pterm '[' var '<-' bite ']'
// bite  ::= var var | '\' var '.' pterm | '(' '\' var '.' pterm ')' var
// '<-' may be written as the Unicode left arrow.
const PositiveTerm* parse_positive(std::string_view text, TermArena& arena, NameSupply& supply);

std::string to_string(const LambdaTerm* t, const NameSupply& supply);
std::string to_string(const PositiveTerm* t, const NameSupply& supply);
std::string to_string(const Bite* b, const NameSupply& supply);

// ------------------------------------------------------------------
// basic operations
// ------------------------------------------------------------------

inline std::uint32_t size(const PositiveTerm* t) { return t->size; }
inline std::uint32_t size(const Bite* b) { return b->size; }

// Free variables, sorted ascending, no duplicates.
std::vector<VarId> free_vars(const PositiveTerm* t);
std::vector<VarId> free_vars(const Bite* b);
std::vector<VarId> free_vars(const LambdaTerm* t);
bool occurs_free(const PositiveTerm* t, VarId x);
bool occurs_free(const Bite* b, VarId x);
bool occurs_free(const LambdaTerm* t, VarId x);

// t{x <- z}: replace free occurrences of variable x by variable z.
// Capture-avoiding: binders named z whose scope contains a free x are renamed
// first (fresh ids from `supply` when given, otherwise above every id in
// sight). Size-preserving. Machine-internal calls only ever see well-bound
// inputs, where no renaming happens.
const PositiveTerm* subst_var(TermArena& arena, const PositiveTerm* t, VarId x, VarId z,
                              NameSupply* supply = nullptr);
const Bite* subst_var(TermArena& arena, const Bite* b, VarId x, VarId z,
                      NameSupply* supply = nullptr);

// Structure-preserving copy with every binder replaced by a fresh id from the
// supply (display hints preserved). Free occurrences are untouched; the copy
// shares no binder id with any term the supply has seen.
const PositiveTerm* alpha_copy(TermArena& arena, const PositiveTerm* t, NameSupply& supply);
const Bite* alpha_copy(TermArena& arena, const Bite* b, NameSupply& supply);
const LambdaTerm* alpha_copy(TermArena& arena, const LambdaTerm* t, NameSupply& supply);

// True iff all binders in t are pairwise distinct ids.
bool well_bound(const PositiveTerm* t);

// Largest variable id occurring anywhere in the term (0 if none).
VarId max_var_id(const PositiveTerm* t);
VarId max_var_id(const LambdaTerm* t);

// ------------------------------------------------------------------
// equality
// ------------------------------------------------------------------

// Literal structural equality (ids compared as ids). Hash/pointer shortcuts.
bool pre_eq(const PositiveTerm* a, const PositiveTerm* b);
bool pre_eq(const Bite* a, const Bite* b);

// Alpha-equivalence: bound ids are matched by a bijection built during a
// parallel walk; free ids must match literally.
bool alpha_eq(const PositiveTerm* a, const PositiveTerm* b);
bool alpha_eq(const LambdaTerm* a, const LambdaTerm* b);

// Canonical key: bound variables numbered in traversal order, free variables
// by id. Two terms have the same key iff they are alpha-equivalent.
std::string canon_key(const PositiveTerm* t);
std::string canon_key(const LambdaTerm* t);

}  // namespace pom
