#include "pom/syntax.hpp"

#include <algorithm>
#include <memory>
#include <unordered_set>

namespace pom {

// ------------------------------------------------------------------
// NameSupply
// ------------------------------------------------------------------

VarId NameSupply::fresh(std::string_view hint) {
    VarId id = next_++;
    std::string name = hint.empty() ? "v" + std::to_string(id) : std::string(hint);
    while (used_.count(name)) name += '\'';
    used_.emplace(name, id);
    names_.emplace(id, name);
    return id;
}

VarId NameSupply::intern(std::string_view name) {
    auto it = used_.find(std::string(name));
    if (it != used_.end()) return it->second;
    return fresh(name);
}

std::string NameSupply::name_of(VarId id) const {
    auto it = names_.find(id);
    if (it != names_.end()) return it->second;
    // Id not issued by this supply: derive a stable fallback, dodging any
    // recorded name it would collide with.
    std::string name = "v" + std::to_string(id);
    while (true) {
        auto used = used_.find(name);
        if (used == used_.end() || used->second == id) return name;
        name += '\'';
    }
}

// ------------------------------------------------------------------
// TermArena
// ------------------------------------------------------------------

namespace {

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 12) + (h >> 4);
    return h * 0xff51afd7ed558ccdull;
}

}  // namespace

const LambdaTerm* TermArena::lvar(VarId x) {
    LambdaTerm t;
    t.kind = LambdaTerm::Kind::Var;
    t.var = x;
    t.n_nodes = 1;
    t.hash = mix(1, x);
    lterms_.push_back(t);
    return &lterms_.back();
}

const LambdaTerm* TermArena::labs(VarId binder, const LambdaTerm* body) {
    LambdaTerm t;
    t.kind = LambdaTerm::Kind::Abs;
    t.var = binder;
    t.a = body;
    t.n_nodes = 1 + body->n_nodes;
    t.hash = mix(2, mix(binder, body->hash));
    lterms_.push_back(t);
    return &lterms_.back();
}

const LambdaTerm* TermArena::lapp(const LambdaTerm* fn, const LambdaTerm* arg) {
    LambdaTerm t;
    t.kind = LambdaTerm::Kind::App;
    t.a = fn;
    t.b = arg;
    t.n_nodes = 1 + fn->n_nodes + arg->n_nodes;
    t.hash = mix(3, mix(fn->hash, arg->hash));
    lterms_.push_back(t);
    return &lterms_.back();
}

const PositiveTerm* TermArena::pvar(VarId x) {
    PositiveTerm t;
    t.kind = PositiveTerm::Kind::Var;
    t.var = x;
    t.size = 1;
    t.hash = mix(4, x);
    pterms_.push_back(t);
    return &pterms_.back();
}

const PositiveTerm* TermArena::es(const PositiveTerm* body, VarId binder, const Bite* bite) {
    PositiveTerm t;
    t.kind = PositiveTerm::Kind::ES;
    t.var = binder;
    t.body = body;
    t.bite = bite;
    t.size = body->size + bite->size;
    t.hash = mix(5, mix(binder, mix(body->hash, bite->hash)));
    pterms_.push_back(t);
    return &pterms_.back();
}

const Bite* TermArena::var_app(VarId y, VarId z) {
    Bite b;
    b.kind = Bite::Kind::VarApp;
    b.u = y;
    b.v = z;
    b.size = 2;
    b.hash = mix(6, mix(y, z));
    bites_.push_back(b);
    return &bites_.back();
}

const Bite* TermArena::abs(VarId binder, const PositiveTerm* body) {
    Bite b;
    b.kind = Bite::Kind::Abs;
    b.u = binder;
    b.body = body;
    b.size = 1 + body->size;
    b.hash = mix(7, mix(binder, body->hash));
    bites_.push_back(b);
    return &bites_.back();
}

const Bite* TermArena::redex_app(VarId binder, const PositiveTerm* body, VarId arg) {
    Bite b;
    b.kind = Bite::Kind::RedexApp;
    b.u = binder;
    b.v = arg;
    b.body = body;
    b.size = 2 + body->size;
    b.hash = mix(8, mix(binder, mix(body->hash, arg)));
    bites_.push_back(b);
    return &bites_.back();
}

// ------------------------------------------------------------------
// lexer (shared by both grammars)
// ------------------------------------------------------------------

namespace {

enum class Tok : std::uint8_t {
    Ident, Lambda, Dot, LParen, RParen, LBracket, RBracket, Arrow, End
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

const char* tok_name(Tok k) {
    switch (k) {
        case Tok::Ident: return "identifier";
        case Tok::Lambda: return "'\\'";
        case Tok::Dot: return "'.'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Arrow: return "'<-'";
        case Tok::End: return "end of input";
    }
    return "?";
}

inline bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }

    Token expect(Tok kind, const char* what) {
        if (tok_.kind != kind)
            fail(std::string("expected ") + what + ", found " + tok_name(tok_.kind) +
                 (tok_.kind == Tok::Ident ? " '" + tok_.text + "'" : ""));
        return next();
    }

private:
    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_; ++col_;
            } else if (c == '\n') {
                ++pos_; ++line_; col_ = 1;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.col = col_;
        tok_.text.clear();
        if (pos_ >= text_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        char c = text_[pos_];
        if (ident_start(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && ident_char(text_[pos_])) { ++pos_; ++col_; }
            tok_.kind = Tok::Ident;
            tok_.text.assign(text_.substr(start, pos_ - start));
            return;
        }
        switch (c) {
            case '\\': tok_.kind = Tok::Lambda; ++pos_; ++col_; return;
            case '.': tok_.kind = Tok::Dot; ++pos_; ++col_; return;
            case '(': tok_.kind = Tok::LParen; ++pos_; ++col_; return;
            case ')': tok_.kind = Tok::RParen; ++pos_; ++col_; return;
            case '[': tok_.kind = Tok::LBracket; ++pos_; ++col_; return;
            case ']': tok_.kind = Tok::RBracket; ++pos_; ++col_; return;
            default: break;
        }
        if (c == '<' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
            tok_.kind = Tok::Arrow; pos_ += 2; col_ += 2; return;
        }
        // UTF-8 lambda (0xCE 0xBB) and left arrow (0xE2 0x86 0x90)
        auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text_[i]); };
        if (byte(pos_) == 0xCE && pos_ + 1 < text_.size() && byte(pos_ + 1) == 0xBB) {
            tok_.kind = Tok::Lambda; pos_ += 2; ++col_; return;
        }
        if (byte(pos_) == 0xE2 && pos_ + 2 < text_.size() && byte(pos_ + 1) == 0x86 &&
            byte(pos_ + 2) == 0x90) {
            tok_.kind = Tok::Arrow; pos_ += 3; ++col_; return;
        }
        throw ParseError("unsupported character '" + std::string(1, c) + "'", line_, col_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

constexpr int kMaxParseDepth = 10000;

// Name resolution shared by both parsers: lexical scoping with shadowing;
// free names are interned once per parse.
struct Scope {
    NameSupply& supply;
    std::unordered_map<std::string, std::vector<VarId>> bound;

    explicit Scope(NameSupply& s) : supply(s) {}

    VarId push(const std::string& name) {
        VarId id = supply.fresh(name);
        bound[name].push_back(id);
        return id;
    }
    void pop(const std::string& name) { bound[name].pop_back(); }
    VarId resolve(const std::string& name) {
        auto it = bound.find(name);
        if (it != bound.end() && !it->second.empty()) return it->second.back();
        return supply.intern(name);  // free name: stable id within this supply
    }
};

// ---------------- lambda terms ----------------

class LambdaParser {
public:
    LambdaParser(std::string_view text, TermArena& arena, NameSupply& supply)
        : lex_(text), arena_(arena), scope_(supply) {}

    const LambdaTerm* parse() {
        const LambdaTerm* t = term(0);
        if (lex_.peek().kind != Tok::End)
            lex_.fail(std::string("unexpected ") + tok_name(lex_.peek().kind) + " after term");
        return t;
    }

private:
    // term := atom+ with an optional trailing abstraction that extends
    // maximally right; application associates left.
    const LambdaTerm* term(int depth) {
        if (depth > kMaxParseDepth) lex_.fail("nesting too deep");
        const LambdaTerm* acc = nullptr;
        while (true) {
            const Token& t = lex_.peek();
            const LambdaTerm* item = nullptr;
            if (t.kind == Tok::Ident || t.kind == Tok::LParen) {
                item = atom(depth + 1);
            } else if (t.kind == Tok::Lambda) {
                item = abstraction(depth + 1);
                acc = acc ? arena_.lapp(acc, item) : item;
                break;  // the body already consumed everything to the right
            } else {
                break;
            }
            acc = acc ? arena_.lapp(acc, item) : item;
        }
        if (!acc)
            lex_.fail(std::string("expected term, found ") + tok_name(lex_.peek().kind));
        return acc;
    }

    const LambdaTerm* abstraction(int depth) {
        lex_.next();  // lambda marker
        Token name = lex_.expect(Tok::Ident, "binder name");
        lex_.expect(Tok::Dot, "'.'");
        VarId binder = scope_.push(name.text);
        const LambdaTerm* body = term(depth + 1);
        scope_.pop(name.text);
        return arena_.labs(binder, body);
    }

    const LambdaTerm* atom(int depth) {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Ident) {
            Token name = lex_.next();
            return arena_.lvar(scope_.resolve(name.text));
        }
        lex_.expect(Tok::LParen, "'('");
        const LambdaTerm* inner = term(depth + 1);
        lex_.expect(Tok::RParen, "')'");
        return inner;
    }

    Lexer lex_;
    TermArena& arena_;
    Scope scope_;
};

// ---------------- positive terms ----------------
//
// An explicit substitution t[x <- b] binds x in the already-read t, so the
// parser first builds a raw named tree and resolves names top-down.

struct RawBite;

struct RawPos {
    bool is_var = true;
    std::string name;           // var
    std::unique_ptr<RawPos> body;  // es
    std::string binder;
    std::unique_ptr<RawBite> bite;
};

struct RawBite {
    Bite::Kind kind = Bite::Kind::VarApp;
    std::string y, z;              // var_app: y z; redex_app: arg z
    std::string binder;            // abs / redex_app
    std::unique_ptr<RawPos> body;  // abs / redex_app
};

class PositiveParser {
public:
    PositiveParser(std::string_view text, TermArena& arena, NameSupply& supply)
        : lex_(text), arena_(arena), scope_(supply) {}

    const PositiveTerm* parse() {
        std::unique_ptr<RawPos> raw = pterm(0);
        if (lex_.peek().kind != Tok::End)
            lex_.fail(std::string("unexpected ") + tok_name(lex_.peek().kind) + " after term");
        return resolve_term(*raw);
    }

private:
    std::unique_ptr<RawPos> pterm(int depth) {
        if (depth > kMaxParseDepth) lex_.fail("nesting too deep");
        Token head = lex_.expect(Tok::Ident, "variable");
        auto t = std::make_unique<RawPos>();
        t->name = head.text;
        while (lex_.peek().kind == Tok::LBracket) {
            lex_.next();
            Token binder = lex_.expect(Tok::Ident, "binder name");
            lex_.expect(Tok::Arrow, "'<-'");
            auto b = bite(depth + 1);
            lex_.expect(Tok::RBracket, "']'");
            auto es = std::make_unique<RawPos>();
            es->is_var = false;
            es->body = std::move(t);
            es->binder = binder.text;
            es->bite = std::move(b);
            t = std::move(es);
        }
        return t;
    }

    std::unique_ptr<RawBite> bite(int depth) {
        auto b = std::make_unique<RawBite>();
        const Token& t = lex_.peek();
        if (t.kind == Tok::Lambda) {
            lex_.next();
            Token binder = lex_.expect(Tok::Ident, "binder name");
            lex_.expect(Tok::Dot, "'.'");
            b->kind = Bite::Kind::Abs;
            b->binder = binder.text;
            b->body = pterm(depth + 1);
            return b;
        }
        if (t.kind == Tok::LParen) {
            lex_.next();
            lex_.expect(Tok::Lambda, "'\\'");
            Token binder = lex_.expect(Tok::Ident, "binder name");
            lex_.expect(Tok::Dot, "'.'");
            b->kind = Bite::Kind::RedexApp;
            b->binder = binder.text;
            b->body = pterm(depth + 1);
            lex_.expect(Tok::RParen, "')'");
            Token arg = lex_.expect(Tok::Ident, "argument variable");
            b->z = arg.text;
            return b;
        }
        Token y = lex_.expect(Tok::Ident, "variable");
        Token z = lex_.expect(Tok::Ident, "argument variable");
        b->kind = Bite::Kind::VarApp;
        b->y = y.text;
        b->z = z.text;
        return b;
    }

    const PositiveTerm* resolve_term(const RawPos& raw) {
        // Collect the ES spine outermost-first; binders scope over everything
        // nested inside them (body side), while each bite sits outside its own
        // binder's scope.
        std::vector<const RawPos*> chain;
        const RawPos* cur = &raw;
        while (!cur->is_var) {
            chain.push_back(cur);
            cur = cur->body.get();
        }
        std::vector<std::pair<VarId, const Bite*>> entries;
        entries.reserve(chain.size());
        for (const RawPos* node : chain) {
            const Bite* b = resolve_bite(*node->bite);
            VarId binder = scope_.push(node->binder);
            entries.emplace_back(binder, b);
        }
        const PositiveTerm* t = arena_.pvar(scope_.resolve(cur->name));
        for (std::size_t i = entries.size(); i-- > 0;)
            t = arena_.es(t, entries[i].first, entries[i].second);
        for (std::size_t i = chain.size(); i-- > 0;) scope_.pop(chain[i]->binder);
        return t;
    }

    const Bite* resolve_bite(const RawBite& raw) {
        switch (raw.kind) {
            case Bite::Kind::VarApp:
                return arena_.var_app(scope_.resolve(raw.y), scope_.resolve(raw.z));
            case Bite::Kind::Abs: {
                VarId binder = scope_.push(raw.binder);
                const PositiveTerm* body = resolve_term(*raw.body);
                scope_.pop(raw.binder);
                return arena_.abs(binder, body);
            }
            case Bite::Kind::RedexApp: {
                VarId arg = scope_.resolve(raw.z);  // outside the binder's scope
                VarId binder = scope_.push(raw.binder);
                const PositiveTerm* body = resolve_term(*raw.body);
                scope_.pop(raw.binder);
                return arena_.redex_app(binder, body, arg);
            }
        }
        lex_.fail("invalid bite");
    }

    Lexer lex_;
    TermArena& arena_;
    Scope scope_;
};

}  // namespace

const LambdaTerm* parse_lambda(std::string_view text, TermArena& arena, NameSupply& supply) {
    return LambdaParser(text, arena, supply).parse();
}

const PositiveTerm* parse_positive(std::string_view text, TermArena& arena, NameSupply& supply) {
    return PositiveParser(text, arena, supply).parse();
}

// ------------------------------------------------------------------
// printing
// ------------------------------------------------------------------

namespace {

void print_lambda(const LambdaTerm* t, const NameSupply& supply, std::string& out) {
    switch (t->kind) {
        case LambdaTerm::Kind::Var:
            out += supply.name_of(t->var);
            return;
        case LambdaTerm::Kind::Abs:
            out += '\\';
            out += supply.name_of(t->var);
            out += '.';
            print_lambda(t->a, supply, out);
            return;
        case LambdaTerm::Kind::App: {
            bool fn_parens = t->a->kind == LambdaTerm::Kind::Abs;
            if (fn_parens) out += '(';
            print_lambda(t->a, supply, out);
            if (fn_parens) out += ')';
            out += ' ';
            bool arg_parens = t->b->kind != LambdaTerm::Kind::Var;
            if (arg_parens) out += '(';
            print_lambda(t->b, supply, out);
            if (arg_parens) out += ')';
            return;
        }
    }
}

void print_positive(const PositiveTerm* t, const NameSupply& supply, std::string& out);

void print_bite(const Bite* b, const NameSupply& supply, std::string& out) {
    switch (b->kind) {
        case Bite::Kind::VarApp:
            out += supply.name_of(b->u);
            out += ' ';
            out += supply.name_of(b->v);
            return;
        case Bite::Kind::Abs:
            out += '\\';
            out += supply.name_of(b->u);
            out += '.';
            print_positive(b->body, supply, out);
            return;
        case Bite::Kind::RedexApp:
            out += "(\\";
            out += supply.name_of(b->u);
            out += '.';
            print_positive(b->body, supply, out);
            out += ") ";
            out += supply.name_of(b->v);
            return;
    }
}

void print_positive(const PositiveTerm* t, const NameSupply& supply, std::string& out) {
    // Spine entries print innermost-first after the head variable.
    std::vector<const PositiveTerm*> chain;
    while (t->kind == PositiveTerm::Kind::ES) {
        chain.push_back(t);
        t = t->body;
    }
    out += supply.name_of(t->var);
    for (std::size_t i = chain.size(); i-- > 0;) {
        const PositiveTerm* es = chain[i];
        out += '[';
        out += supply.name_of(es->var);
        out += " <- ";
        print_bite(es->bite, supply, out);
        out += ']';
    }
}

}  // namespace

std::string to_string(const LambdaTerm* t, const NameSupply& supply) {
    std::string out;
    print_lambda(t, supply, out);
    return out;
}

std::string to_string(const PositiveTerm* t, const NameSupply& supply) {
    std::string out;
    print_positive(t, supply, out);
    return out;
}

std::string to_string(const Bite* b, const NameSupply& supply) {
    std::string out;
    print_bite(b, supply, out);
    return out;
}

// ------------------------------------------------------------------
// free variables
// ------------------------------------------------------------------

namespace {

void collect_free(const PositiveTerm* t, std::unordered_set<VarId>& acc);

void collect_free(const Bite* b, std::unordered_set<VarId>& acc) {
    switch (b->kind) {
        case Bite::Kind::VarApp:
            acc.insert(b->u);
            acc.insert(b->v);
            return;
        case Bite::Kind::Abs: {
            std::unordered_set<VarId> inner;
            collect_free(b->body, inner);
            inner.erase(b->u);
            acc.insert(inner.begin(), inner.end());
            return;
        }
        case Bite::Kind::RedexApp: {
            std::unordered_set<VarId> inner;
            collect_free(b->body, inner);
            inner.erase(b->u);
            acc.insert(inner.begin(), inner.end());
            acc.insert(b->v);
            return;
        }
    }
}

// fv(t[x <- b]) = (fv(t) \ {x}) u fv(b): fold the spine innermost-out.
void collect_free(const PositiveTerm* t, std::unordered_set<VarId>& acc) {
    std::vector<const PositiveTerm*> chain;
    while (t->kind == PositiveTerm::Kind::ES) {
        chain.push_back(t);
        t = t->body;
    }
    std::unordered_set<VarId> set;
    set.insert(t->var);
    for (std::size_t i = chain.size(); i-- > 0;) {
        set.erase(chain[i]->var);
        collect_free(chain[i]->bite, set);
    }
    acc.insert(set.begin(), set.end());
}

std::vector<VarId> sorted(std::unordered_set<VarId>&& set) {
    std::vector<VarId> out(set.begin(), set.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<VarId> free_vars(const PositiveTerm* t) {
    std::unordered_set<VarId> acc;
    collect_free(t, acc);
    return sorted(std::move(acc));
}

std::vector<VarId> free_vars(const Bite* b) {
    std::unordered_set<VarId> acc;
    collect_free(b, acc);
    return sorted(std::move(acc));
}

std::vector<VarId> free_vars(const LambdaTerm* t) {
    std::unordered_set<VarId> acc;
    std::vector<VarId> bound;
    // Explicit stack: (node, bound-prefix length on entry handled via frames).
    struct Frame { const LambdaTerm* node; std::size_t pop_at_exit; };
    std::vector<Frame> stack{{t, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (!f.node) {  // scope exit marker
            bound.resize(f.pop_at_exit);
            continue;
        }
        switch (f.node->kind) {
            case LambdaTerm::Kind::Var:
                if (std::find(bound.begin(), bound.end(), f.node->var) == bound.end())
                    acc.insert(f.node->var);
                break;
            case LambdaTerm::Kind::Abs:
                stack.push_back({nullptr, bound.size()});
                bound.push_back(f.node->var);
                stack.push_back({f.node->a, 0});
                break;
            case LambdaTerm::Kind::App:
                stack.push_back({f.node->b, 0});
                stack.push_back({f.node->a, 0});
                break;
        }
    }
    return sorted(std::move(acc));
}

bool occurs_free(const Bite* b, VarId x) {
    switch (b->kind) {
        case Bite::Kind::VarApp: return b->u == x || b->v == x;
        case Bite::Kind::Abs: return b->u != x && occurs_free(b->body, x);
        case Bite::Kind::RedexApp:
            return b->v == x || (b->u != x && occurs_free(b->body, x));
    }
    return false;
}

bool occurs_free(const PositiveTerm* t, VarId x) {
    // Walk outermost-in: a bite sits outside its own binder's scope, and a
    // binder equal to x shields everything further in.
    while (t->kind == PositiveTerm::Kind::ES) {
        if (occurs_free(t->bite, x)) return true;
        if (t->var == x) return false;
        t = t->body;
    }
    return t->var == x;
}

bool occurs_free(const LambdaTerm* t, VarId x) {
    switch (t->kind) {
        case LambdaTerm::Kind::Var: return t->var == x;
        case LambdaTerm::Kind::Abs: return t->var != x && occurs_free(t->a, x);
        case LambdaTerm::Kind::App: return occurs_free(t->a, x) || occurs_free(t->b, x);
    }
    return false;
}

// ------------------------------------------------------------------
// renaming substitution t{x <- z}
// ------------------------------------------------------------------

namespace {

// Fresh-id source for capture-avoiding renames: a supply when available,
// otherwise ids above everything in sight (computed lazily; renaming is a
// cold path, machine inputs are well-bound).
struct FreshSource {
    NameSupply* supply;
    VarId local_next = 0;
    const PositiveTerm* root;
    VarId floor;

    VarId next() {
        if (supply) return supply->fresh();
        if (local_next == 0) local_next = std::max(max_var_id(root), floor) + 1;
        return local_next++;
    }
};

const PositiveTerm* subst_term(TermArena& arena, const PositiveTerm* t, VarId x, VarId z,
                               FreshSource& fresh);

const Bite* subst_bite(TermArena& arena, const Bite* b, VarId x, VarId z, FreshSource& fresh) {
    switch (b->kind) {
        case Bite::Kind::VarApp: {
            VarId y = b->u == x ? z : b->u;
            VarId v = b->v == x ? z : b->v;
            return (y == b->u && v == b->v) ? b : arena.var_app(y, v);
        }
        case Bite::Kind::Abs: {
            if (b->u == x) return b;  // binder shields the body
            VarId binder = b->u;
            const PositiveTerm* body = b->body;
            if (binder == z && occurs_free(body, x)) {
                VarId renamed = fresh.next();
                body = subst_term(arena, body, binder, renamed, fresh);
                binder = renamed;
            }
            const PositiveTerm* nb = subst_term(arena, body, x, z, fresh);
            return (nb == b->body && binder == b->u) ? b : arena.abs(binder, nb);
        }
        case Bite::Kind::RedexApp: {
            VarId arg = b->v == x ? z : b->v;
            VarId binder = b->u;
            const PositiveTerm* body = b->body;
            if (binder != x) {
                if (binder == z && occurs_free(body, x)) {
                    VarId renamed = fresh.next();
                    body = subst_term(arena, body, binder, renamed, fresh);
                    binder = renamed;
                }
                body = subst_term(arena, body, x, z, fresh);
            }
            return (body == b->body && binder == b->u && arg == b->v)
                       ? b
                       : arena.redex_app(binder, body, arg);
        }
    }
    return b;
}

const PositiveTerm* subst_term(TermArena& arena, const PositiveTerm* t, VarId x, VarId z,
                               FreshSource& fresh) {
    // Iterative over the ES spine; recursion only enters abstraction bodies.
    std::vector<std::pair<VarId, const Bite*>> entries;
    const PositiveTerm* cur = t;
    const PositiveTerm* tail = nullptr;  // shared unchanged remainder
    bool changed = false;
    while (cur->kind == PositiveTerm::Kind::ES) {
        const Bite* nb = subst_bite(arena, cur->bite, x, z, fresh);
        if (nb != cur->bite) changed = true;
        VarId binder = cur->var;
        if (binder == x) {
            // Everything further in is shielded.
            entries.emplace_back(binder, nb);
            tail = cur->body;
            break;
        }
        const PositiveTerm* inner = cur->body;
        if (binder == z && occurs_free(inner, x)) {
            VarId renamed = fresh.next();
            inner = subst_term(arena, inner, binder, renamed, fresh);
            binder = renamed;
            changed = true;
        }
        entries.emplace_back(binder, nb);
        cur = inner;
    }
    if (!tail) {
        if (cur->var == x) {
            tail = arena.pvar(z);
            changed = true;
        } else {
            tail = cur;
        }
    }
    if (!changed) return t;
    const PositiveTerm* out = tail;
    for (std::size_t i = entries.size(); i-- > 0;)
        out = arena.es(out, entries[i].first, entries[i].second);
    return out;
}

}  // namespace

const PositiveTerm* subst_var(TermArena& arena, const PositiveTerm* t, VarId x, VarId z,
                              NameSupply* supply) {
    if (x == z) return t;
    FreshSource fresh{supply, 0, t, std::max(x, z)};
    return subst_term(arena, t, x, z, fresh);
}

const Bite* subst_var(TermArena& arena, const Bite* b, VarId x, VarId z, NameSupply* supply) {
    if (x == z) return b;
    // Reuse the term path for the lazy fresh floor.
    FreshSource fresh{supply, 0, nullptr, std::max(x, z)};
    if (!supply) {
        VarId m = std::max(x, z);
        if (b->body) m = std::max(m, max_var_id(b->body));
        m = std::max({m, b->u, b->v});
        fresh.local_next = m + 1;
    }
    return subst_bite(arena, b, x, z, fresh);
}

// ------------------------------------------------------------------
// alpha-copy
// ------------------------------------------------------------------

namespace {

struct Renamer {
    TermArena& arena;
    NameSupply& supply;
    std::unordered_map<VarId, VarId> map;
    std::vector<std::pair<VarId, std::optional<VarId>>> undo;

    void bind(VarId from, VarId to) {
        auto it = map.find(from);
        undo.emplace_back(from, it == map.end() ? std::nullopt : std::optional<VarId>(it->second));
        map[from] = to;
    }
    void rollback(std::size_t mark) {
        while (undo.size() > mark) {
            auto& [id, old] = undo.back();
            if (old) map[id] = *old; else map.erase(id);
            undo.pop_back();
        }
    }
    VarId rename(VarId v) const {
        auto it = map.find(v);
        return it == map.end() ? v : it->second;
    }
    VarId fresh_for(VarId binder) { return supply.fresh(supply.name_of(binder)); }

    const Bite* copy(const Bite* b) {
        switch (b->kind) {
            case Bite::Kind::VarApp:
                return arena.var_app(rename(b->u), rename(b->v));
            case Bite::Kind::Abs: {
                std::size_t mark = undo.size();
                VarId binder = fresh_for(b->u);
                bind(b->u, binder);
                const PositiveTerm* body = copy(b->body);
                rollback(mark);
                return arena.abs(binder, body);
            }
            case Bite::Kind::RedexApp: {
                VarId arg = rename(b->v);
                std::size_t mark = undo.size();
                VarId binder = fresh_for(b->u);
                bind(b->u, binder);
                const PositiveTerm* body = copy(b->body);
                rollback(mark);
                return arena.redex_app(binder, body, arg);
            }
        }
        return b;
    }

    const PositiveTerm* copy(const PositiveTerm* t) {
        std::size_t mark = undo.size();
        std::vector<std::pair<VarId, const Bite*>> entries;
        while (t->kind == PositiveTerm::Kind::ES) {
            // The bite sits outside its own binder's scope.
            const Bite* nb = copy(t->bite);
            VarId binder = fresh_for(t->var);
            entries.emplace_back(binder, nb);
            bind(t->var, binder);
            t = t->body;
        }
        const PositiveTerm* out = arena.pvar(rename(t->var));
        for (std::size_t i = entries.size(); i-- > 0;)
            out = arena.es(out, entries[i].first, entries[i].second);
        rollback(mark);
        return out;
    }

    const LambdaTerm* copy(const LambdaTerm* t) {
        switch (t->kind) {
            case LambdaTerm::Kind::Var:
                return arena.lvar(rename(t->var));
            case LambdaTerm::Kind::Abs: {
                std::size_t mark = undo.size();
                VarId binder = fresh_for(t->var);
                bind(t->var, binder);
                const LambdaTerm* body = copy(t->a);
                rollback(mark);
                return arena.labs(binder, body);
            }
            case LambdaTerm::Kind::App: {
                const LambdaTerm* fn = copy(t->a);
                const LambdaTerm* arg = copy(t->b);
                return arena.lapp(fn, arg);
            }
        }
        return t;
    }
};

}  // namespace

const PositiveTerm* alpha_copy(TermArena& arena, const PositiveTerm* t, NameSupply& supply) {
    supply.ensure_above(max_var_id(t));
    Renamer r{arena, supply, {}, {}};
    return r.copy(t);
}

const Bite* alpha_copy(TermArena& arena, const Bite* b, NameSupply& supply) {
    VarId m = std::max(b->u, b->v);
    if (b->body) m = std::max(m, max_var_id(b->body));
    supply.ensure_above(m);
    Renamer r{arena, supply, {}, {}};
    return r.copy(b);
}

const LambdaTerm* alpha_copy(TermArena& arena, const LambdaTerm* t, NameSupply& supply) {
    supply.ensure_above(max_var_id(t));
    Renamer r{arena, supply, {}, {}};
    return r.copy(t);
}

// ------------------------------------------------------------------
// well-boundness, id bounds
// ------------------------------------------------------------------

namespace {

bool collect_binders(const PositiveTerm* t, std::unordered_set<VarId>& seen);

bool collect_binders(const Bite* b, std::unordered_set<VarId>& seen) {
    if (b->kind == Bite::Kind::VarApp) return true;
    if (!seen.insert(b->u).second) return false;
    return collect_binders(b->body, seen);
}

bool collect_binders(const PositiveTerm* t, std::unordered_set<VarId>& seen) {
    while (t->kind == PositiveTerm::Kind::ES) {
        if (!seen.insert(t->var).second) return false;
        if (!collect_binders(t->bite, seen)) return false;
        t = t->body;
    }
    return true;
}

}  // namespace

bool well_bound(const PositiveTerm* t) {
    std::unordered_set<VarId> seen;
    return collect_binders(t, seen);
}

VarId max_var_id(const PositiveTerm* t) {
    VarId m = 0;
    std::vector<const PositiveTerm*> terms{t};
    std::vector<const Bite*> bites;
    while (!terms.empty() || !bites.empty()) {
        if (!terms.empty()) {
            const PositiveTerm* cur = terms.back();
            terms.pop_back();
            while (cur->kind == PositiveTerm::Kind::ES) {
                m = std::max(m, cur->var);
                bites.push_back(cur->bite);
                cur = cur->body;
            }
            m = std::max(m, cur->var);
        } else {
            const Bite* b = bites.back();
            bites.pop_back();
            m = std::max({m, b->u, b->v});
            if (b->body) terms.push_back(b->body);
        }
    }
    return m;
}

VarId max_var_id(const LambdaTerm* t) {
    VarId m = 0;
    std::vector<const LambdaTerm*> stack{t};
    while (!stack.empty()) {
        const LambdaTerm* cur = stack.back();
        stack.pop_back();
        m = std::max(m, cur->var);
        if (cur->a) stack.push_back(cur->a);
        if (cur->b) stack.push_back(cur->b);
    }
    return m;
}

// ------------------------------------------------------------------
// equality
// ------------------------------------------------------------------

bool pre_eq(const Bite* a, const Bite* b) {
    if (a == b) return true;
    if (a->hash != b->hash || a->kind != b->kind || a->u != b->u || a->v != b->v) return false;
    if (!a->body) return true;
    return pre_eq(a->body, b->body);
}

bool pre_eq(const PositiveTerm* a, const PositiveTerm* b) {
    while (true) {
        if (a == b) return true;
        if (a->hash != b->hash || a->kind != b->kind || a->var != b->var) return false;
        if (a->kind == PositiveTerm::Kind::Var) return true;
        if (!pre_eq(a->bite, b->bite)) return false;
        a = a->body;
        b = b->body;
    }
}

namespace {

// Parallel walk keeping a bound-variable bijection (with shadowing undo).
struct AlphaCmp {
    std::unordered_map<VarId, VarId> a2b, b2a;
    std::vector<std::pair<VarId, std::optional<VarId>>> undo_a, undo_b;

    void bind(VarId a, VarId b) {
        auto ia = a2b.find(a);
        undo_a.emplace_back(a, ia == a2b.end() ? std::nullopt : std::optional<VarId>(ia->second));
        a2b[a] = b;
        auto ib = b2a.find(b);
        undo_b.emplace_back(b, ib == b2a.end() ? std::nullopt : std::optional<VarId>(ib->second));
        b2a[b] = a;
    }
    struct Mark { std::size_t a, b; };
    Mark mark() const { return {undo_a.size(), undo_b.size()}; }
    void rollback(Mark m) {
        while (undo_a.size() > m.a) {
            auto& [id, old] = undo_a.back();
            if (old) a2b[id] = *old; else a2b.erase(id);
            undo_a.pop_back();
        }
        while (undo_b.size() > m.b) {
            auto& [id, old] = undo_b.back();
            if (old) b2a[id] = *old; else b2a.erase(id);
            undo_b.pop_back();
        }
    }
    bool vars(VarId a, VarId b) const {
        auto ia = a2b.find(a);
        auto ib = b2a.find(b);
        if (ia != a2b.end() || ib != b2a.end())
            return ia != a2b.end() && ib != b2a.end() && ia->second == b && ib->second == a;
        return a == b;  // both free
    }

    bool bites(const Bite* a, const Bite* b) {
        if (a->kind != b->kind) return false;
        switch (a->kind) {
            case Bite::Kind::VarApp:
                return vars(a->u, b->u) && vars(a->v, b->v);
            case Bite::Kind::Abs: {
                Mark m = mark();
                bind(a->u, b->u);
                bool ok = terms(a->body, b->body);
                rollback(m);
                return ok;
            }
            case Bite::Kind::RedexApp: {
                if (!vars(a->v, b->v)) return false;
                Mark m = mark();
                bind(a->u, b->u);
                bool ok = terms(a->body, b->body);
                rollback(m);
                return ok;
            }
        }
        return false;
    }

    bool terms(const PositiveTerm* a, const PositiveTerm* b) {
        Mark m = mark();
        bool ok = true;
        while (true) {
            if (a->kind != b->kind) { ok = false; break; }
            if (a->kind == PositiveTerm::Kind::Var) { ok = vars(a->var, b->var); break; }
            // Bite first: it lives outside this entry's own binder.
            if (!bites(a->bite, b->bite)) { ok = false; break; }
            bind(a->var, b->var);
            a = a->body;
            b = b->body;
        }
        rollback(m);
        return ok;
    }

    bool lterms(const LambdaTerm* a, const LambdaTerm* b) {
        if (a->kind != b->kind) return false;
        switch (a->kind) {
            case LambdaTerm::Kind::Var: return vars(a->var, b->var);
            case LambdaTerm::Kind::Abs: {
                Mark m = mark();
                bind(a->var, b->var);
                bool ok = lterms(a->a, b->a);
                rollback(m);
                return ok;
            }
            case LambdaTerm::Kind::App:
                return lterms(a->a, b->a) && lterms(a->b, b->b);
        }
        return false;
    }
};

// Canonical serialization: bound ids numbered in traversal order.
struct Canon {
    std::string out;
    std::unordered_map<VarId, std::uint32_t> bound;
    std::vector<std::pair<VarId, std::optional<std::uint32_t>>> undo;
    std::uint32_t counter = 0;

    void bind(VarId v) {
        auto it = bound.find(v);
        undo.emplace_back(v, it == bound.end() ? std::nullopt
                                               : std::optional<std::uint32_t>(it->second));
        bound[v] = counter++;
    }
    void rollback(std::size_t m) {
        while (undo.size() > m) {
            auto& [id, old] = undo.back();
            if (old) bound[id] = *old; else bound.erase(id);
            undo.pop_back();
        }
    }
    void var(VarId v) {
        auto it = bound.find(v);
        if (it != bound.end()) {
            out += 'b';
            out += std::to_string(it->second);
        } else {
            out += 'f';
            out += std::to_string(v);
        }
        out += ';';
    }

    void bite(const Bite* b) {
        switch (b->kind) {
            case Bite::Kind::VarApp:
                out += 'A';
                var(b->u);
                var(b->v);
                return;
            case Bite::Kind::Abs: {
                out += 'L';
                std::size_t m = undo.size();
                bind(b->u);
                term(b->body);
                rollback(m);
                return;
            }
            case Bite::Kind::RedexApp: {
                out += 'R';
                var(b->v);
                std::size_t m = undo.size();
                bind(b->u);
                term(b->body);
                rollback(m);
                return;
            }
        }
    }

    void term(const PositiveTerm* t) {
        std::size_t m = undo.size();
        while (t->kind == PositiveTerm::Kind::ES) {
            out += 'E';
            bite(t->bite);
            bind(t->var);
            t = t->body;
        }
        out += 'V';
        var(t->var);
        rollback(m);
    }

    void lterm(const LambdaTerm* t) {
        switch (t->kind) {
            case LambdaTerm::Kind::Var:
                out += 'V';
                var(t->var);
                return;
            case LambdaTerm::Kind::Abs: {
                out += 'L';
                std::size_t m = undo.size();
                bind(t->var);
                lterm(t->a);
                rollback(m);
                return;
            }
            case LambdaTerm::Kind::App:
                out += '(';
                lterm(t->a);
                lterm(t->b);
                out += ')';
                return;
        }
    }
};

}  // namespace

bool alpha_eq(const PositiveTerm* a, const PositiveTerm* b) {
    if (a == b) return true;
    if (a->size != b->size) return false;
    AlphaCmp cmp;
    return cmp.terms(a, b);
}

bool alpha_eq(const LambdaTerm* a, const LambdaTerm* b) {
    if (a == b) return true;
    if (a->n_nodes != b->n_nodes) return false;
    AlphaCmp cmp;
    return cmp.lterms(a, b);
}

std::string canon_key(const PositiveTerm* t) {
    Canon c;
    c.term(t);
    return std::move(c.out);
}

std::string canon_key(const LambdaTerm* t) {
    Canon c;
    c.lterm(t);
    return std::move(c.out);
}

}  // namespace pom
