#include "bcsa/term.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

namespace bcsa {

bool sort_leq(Sort a, Sort b) {
    return a == b || b == Sort::Message;
}

std::string_view sort_name(Sort s) {
    switch (s) {
        case Sort::Bool: return "Bool";
        case Sort::Nonce: return "Nonce";
        case Sort::Message: return "Msg";
    }
    return "?";
}

std::optional<Sort> parse_sort(std::string_view s) {
    if (s == "Bool") return Sort::Bool;
    if (s == "Nonce") return Sort::Nonce;
    if (s == "Msg" || s == "Message") return Sort::Message;
    return std::nullopt;
}

std::string_view error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::SortMismatch: return "SortMismatch";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::UnknownSymbol: return "UnknownSymbol";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::KeyCycle: return "KeyCycle";
        case ErrorCode::KeyEscapes: return "KeyEscapes";
        case ErrorCode::InvalidPosition: return "InvalidPosition";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::SideConditionViolation: return "SideConditionViolation";
        case ErrorCode::UnknownAction: return "UnknownAction";
        case ErrorCode::FreshnessClash: return "FreshnessClash";
        case ErrorCode::IllegalCorruption: return "IllegalCorruption";
        case ErrorCode::ContextContainsReservedName: return "ContextContainsReservedName";
        case ErrorCode::UnboundName: return "UnboundName";
        case ErrorCode::UnboundSymbol: return "UnboundSymbol";
        case ErrorCode::IncompatibleSuite: return "IncompatibleSuite";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Error";
}

Error::Error(ErrorCode code, const std::string& msg)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}

// ---------------------------------------------------------------------------
// Hash-consing. Every node is interned, so structural equality is pointer
// equality and shared subterms are never compared twice.

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::size_t str_hash(std::string_view s) {
    std::size_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct InternKey {
    const TermNode* n;
    std::size_t h;
};

bool same_shape(const TermNode& a, const TermNode& b) {
    if (a.kind != b.kind || a.sort != b.sort || a.id != b.id) return false;
    if (a.kind != TermKind::App) return true;
    if (a.sym->name != b.sym->name || a.sym->kind != b.sym->kind || a.sym->label != b.sym->label)
        return false;
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (a.args[i].ptr() != b.args[i].ptr()) return false;
    return true;
}

struct InternHash {
    std::size_t operator()(const InternKey& k) const { return k.h; }
};
struct InternEq {
    bool operator()(const InternKey& a, const InternKey& b) const { return same_shape(*a.n, *b.n); }
};

// Entries are erased by the node deleter before the node memory is released,
// so every key in the map points at a live node.
struct InternTable {
    std::mutex mu;
    std::unordered_map<InternKey, std::weak_ptr<const TermNode>, InternHash, InternEq> map;
};

InternTable& table() {
    static InternTable* t = new InternTable();
    return *t;
}

void release_node(const TermNode* p) {
    {
        auto& tab = table();
        std::lock_guard<std::mutex> lock(tab.mu);
        auto it = tab.map.find(InternKey{p, p->hash});
        if (it != tab.map.end() && it->first.n == p) tab.map.erase(it);
    }
    delete p;  // may cascade into children, each taking the lock again
}

std::size_t node_hash(const TermNode& n) {
    std::size_t h = mix(static_cast<std::size_t>(n.kind), static_cast<std::size_t>(n.sort));
    if (n.kind == TermKind::App) {
        h = mix(h, str_hash(n.sym->name));
        for (const auto& a : n.args) h = mix(h, a.hash());
    } else {
        h = mix(h, str_hash(n.id));
    }
    return h;
}

}  // namespace

struct TermFactory {
    static Term intern(TermNode node) {
        node.hash = node_hash(node);
        auto& tab = table();
        std::lock_guard<std::mutex> lock(tab.mu);
        auto it = tab.map.find(InternKey{&node, node.hash});
        if (it != tab.map.end()) {
            if (auto sp = it->second.lock()) return Term::from_node(std::move(sp));
            // dying node whose deleter has not run yet; let the new one take the slot
            tab.map.erase(it);
        }
        std::shared_ptr<const TermNode> sp(new TermNode(std::move(node)), release_node);
        tab.map.emplace(InternKey{sp.get(), sp->hash}, sp);
        return Term::from_node(std::move(sp));
    }
};

Term Term::from_node(std::shared_ptr<const TermNode> n) { return Term(std::move(n)); }

Term Term::name(const std::string& id) {
    return TermFactory::intern(TermNode{TermKind::Name, id, nullptr, {}, Sort::Nonce, 0, 1, true});
}

Term Term::metavar(const std::string& id, Sort s) {
    return TermFactory::intern(TermNode{TermKind::MetaVar, id, nullptr, {}, s, 0, 1, false});
}

Term Term::app_raw(SymbolPtr sym, TermList args, Sort s) {
    std::size_t size = 1;
    bool ground = true;
    for (const auto& a : args) {
        size += a.size();
        ground = ground && a.ground();
    }
    return TermFactory::intern(TermNode{TermKind::App, {}, std::move(sym), std::move(args), s, 0, size, ground});
}

bool Term::is_app(std::string_view sym) const {
    return n_->kind == TermKind::App && n_->sym->name == sym;
}

const std::string& Term::head() const {
    return n_->kind == TermKind::App ? n_->sym->name : n_->id;
}

bool operator==(const Term& a, const Term& b) { return a.n_ == b.n_; }

int compare_terms(const Term& a, const Term& b) {
    if (a == b) return 0;
    if (int c = a.head().compare(b.head()); c != 0) return c < 0 ? -1 : 1;
    if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    if (a.sort() != b.sort()) return static_cast<int>(a.sort()) < static_cast<int>(b.sort()) ? -1 : 1;
    const auto& x = a.args();
    const auto& y = b.args();
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        if (int c = compare_terms(x[i], y[i]); c != 0) return c;
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
}

// ---------------------------------------------------------------------------

namespace {

const char* const kBuiltins[] = {"pair", "pi1", "pi2", "EQ", "true", "false", "xor", "0",
                                 "hash", "ite", "combine", "G", "init", "pi_o", "pi_S"};

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    return true;
}

}  // namespace

bool Signature::is_builtin(std::string_view name) {
    for (const char* b : kBuiltins)
        if (name == b) return true;
    return false;
}

Signature::Signature() {
    const Sort M = Sort::Message, N = Sort::Nonce, B = Sort::Bool;
    auto fn = [&](const char* n, std::vector<Typing> ts) {
        Symbol s;
        s.name = n;
        s.typings = std::move(ts);
        add(std::move(s));
    };
    fn("pair", {{{M, M}, M}});
    fn("pi1", {{{M}, M}});
    fn("pi2", {{{M}, M}});
    fn("EQ", {{{M, M}, B}});
    fn("true", {{{}, B}});
    fn("false", {{{}, B}});
    fn("xor", {{{N, N}, N}});
    fn("0", {{{}, N}});
    fn("hash", {{{M, N}, N}});
    fn("ite", {{{B, B, B}, B}, {{B, N, N}, N}, {{B, M, M}, M}});
    fn("combine", {{{M, M}, M}});
    fn("G", {{{M}, M}});
    fn("init", {{{N}, M}});
    fn("pi_o", {{{M}, N}});
    fn("pi_S", {{{M}, M}});
}

SymbolPtr Signature::add(Symbol s) {
    if (table_.count(s.name) || names_.count(s.name))
        throw Error(ErrorCode::ConfigError, "duplicate declaration of '" + s.name + "'");
    auto p = std::make_shared<const Symbol>(std::move(s));
    table_.emplace(p->name, p);
    order_.push_back(p);
    return p;
}

SymbolPtr Signature::lookup(std::string_view name) const {
    auto it = table_.find(name);
    return it == table_.end() ? nullptr : it->second;
}

SymbolPtr Signature::require(std::string_view name) const {
    auto p = lookup(name);
    if (!p) throw Error(ErrorCode::UnknownSymbol, "unknown symbol '" + std::string(name) + "'");
    return p;
}

bool Signature::has(std::string_view name) const { return table_.find(name) != table_.end(); }

SymbolPtr Signature::declare_function(const std::string& name, std::vector<Sort> args, Sort result) {
    if (!valid_identifier(name)) throw Error(ErrorCode::ConfigError, "bad symbol name '" + name + "'");
    Symbol s;
    s.name = name;
    s.typings.push_back({std::move(args), result});
    return add(std::move(s));
}

SymbolPtr Signature::declare_constant(const std::string& name, Sort sort) {
    return declare_function(name, {}, sort);
}

SymbolPtr Signature::declare_label(const std::string& name) {
    if (!valid_identifier(name)) throw Error(ErrorCode::ConfigError, "bad label name '" + name + "'");
    Symbol s;
    s.name = name;
    s.typings.push_back({{}, Sort::Message});
    s.label = true;
    return add(std::move(s));
}

SymbolPtr Signature::declare_adversarial(const std::string& name, Sort result) {
    if (!valid_identifier(name)) throw Error(ErrorCode::ConfigError, "bad symbol name '" + name + "'");
    Symbol s;
    s.name = name;
    s.kind = SymKind::Adversarial;
    s.variadic = true;
    s.variadic_result = result;
    return add(std::move(s));
}

void Signature::declare_name(const std::string& id) {
    if (!valid_identifier(id)) throw Error(ErrorCode::ConfigError, "bad name '" + id + "'");
    if (table_.count(id)) throw Error(ErrorCode::ConfigError, "'" + id + "' is already a symbol");
    names_.insert(id);
}

bool Signature::is_name(std::string_view id) const { return names_.count(std::string(id)) > 0; }

std::vector<SymbolPtr> Signature::symbols() const { return order_; }

std::vector<SymbolPtr> Signature::declared_symbols() const {
    std::vector<SymbolPtr> out;
    for (const auto& s : order_)
        if (!is_builtin(s->name)) out.push_back(s);
    return out;
}

const Signature& builtin_signature() {
    static const Signature sig;
    return sig;
}

// ---------------------------------------------------------------------------

Term mk_term(const SymbolPtr& sym, TermList args) {
    if (!sym) throw Error(ErrorCode::UnknownSymbol, "null symbol");
    for (const auto& a : args)
        if (!a.valid()) throw Error(ErrorCode::SortMismatch, "empty argument to " + sym->name);
    if (sym->variadic) {
        return Term::app_raw(sym, std::move(args), sym->variadic_result);
    }
    bool arity_seen = false;
    for (const auto& ty : sym->typings) {
        if (ty.args.size() != args.size()) continue;
        arity_seen = true;
        bool ok = true;
        for (std::size_t i = 0; i < args.size() && ok; ++i) ok = sort_leq(args[i].sort(), ty.args[i]);
        if (ok) return Term::app_raw(sym, std::move(args), ty.result);
    }
    if (!arity_seen)
        throw Error(ErrorCode::ArityMismatch,
                    sym->name + " applied to " + std::to_string(args.size()) + " argument(s)");
    std::string got;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) got += ", ";
        got += sort_name(args[i].sort());
    }
    throw Error(ErrorCode::SortMismatch, sym->name + " does not accept argument sorts (" + got + ")");
}

Term mk(std::string_view builtin, TermList args) {
    return mk_term(builtin_signature().require(builtin), std::move(args));
}

Term t_true() {
    static const Term t = mk("true", {});
    return t;
}
Term t_false() {
    static const Term t = mk("false", {});
    return t;
}
Term t_zero() {
    static const Term t = mk("0", {});
    return t;
}
Term t_eq(const Term& a, const Term& b) { return mk("EQ", {a, b}); }
Term t_ite(const Term& b, const Term& x, const Term& y) { return mk("ite", {b, x, y}); }
Term t_xor(const Term& a, const Term& b) { return mk("xor", {a, b}); }
Term t_pair(const Term& a, const Term& b) { return mk("pair", {a, b}); }
Term t_hash(const Term& m, const Term& k) { return mk("hash", {m, k}); }

// ---------------------------------------------------------------------------
// Traversals. Terms are DAGs, so every walk keeps a visited set.

namespace {

template <class F>
void visit_dag(const Term& t, F&& f) {
    std::unordered_set<const TermNode*> seen;
    std::vector<Term> stack{t};
    while (!stack.empty()) {
        Term cur = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(cur.ptr()).second) continue;
        if (!f(cur)) continue;
        for (const auto& a : cur.args()) stack.push_back(a);
    }
}

}  // namespace

bool occurs(const std::string& name, const Term& t) {
    bool found = false;
    visit_dag(t, [&](const Term& u) {
        if (found) return false;
        if (u.is_name() && u.id() == name) found = true;
        return !found;
    });
    return found;
}

bool occurs_in(const std::string& name, const TermList& ts) {
    for (const auto& t : ts)
        if (occurs(name, t)) return true;
    return false;
}

std::set<std::string> names_of(const Term& t) {
    std::set<std::string> out;
    visit_dag(t, [&](const Term& u) {
        if (u.is_name()) out.insert(u.id());
        return true;
    });
    return out;
}

bool contains_subterm(const Term& t, const Term& sub) {
    bool found = false;
    visit_dag(t, [&](const Term& u) {
        if (found) return false;
        if (u == sub) found = true;
        return !found;
    });
    return found;
}

namespace {

bool is_keyed_hash(const Term& t, const std::string& key) {
    return t.is_app("hash") && t.arg(1).is_name() && t.arg(1).id() == key;
}

// true iff key occurs in t somewhere other than as the key of hash(., key)
bool bare_key(const std::string& key, const Term& t) {
    bool bad = false;
    visit_dag(t, [&](const Term& u) {
        if (bad) return false;
        if (u.is_name() && u.id() == key) {
            bad = true;
            return false;
        }
        if (is_keyed_hash(u, key)) {
            // only descend into the message; the key slot is legitimate
            if (bare_key(key, u.arg(0))) bad = true;
            return false;
        }
        return true;
    });
    return bad;
}

}  // namespace

bool key_only_in_key_position(const std::string& key, const TermList& ts) {
    for (const auto& t : ts)
        if (bare_key(key, t)) return false;
    return true;
}

TermList hashed_arguments(const std::string& key, const TermList& ts) {
    TermList out;
    TermSet seen_args;
    std::unordered_set<const TermNode*> seen;
    bool escapes = false;
    // pre-order, left to right; nested hashes inside a message are collected too
    std::function<void(const Term&)> walk = [&](const Term& u) {
        if (!seen.insert(u.ptr()).second) return;
        if (u.is_name() && u.id() == key) {
            escapes = true;
            return;
        }
        if (is_keyed_hash(u, key)) {
            const Term& m = u.arg(0);
            if (bare_key(key, m))
                throw Error(ErrorCode::KeyCycle, "key " + key + " occurs inside a message hashed under itself");
            if (seen_args.insert(m).second) out.push_back(m);
            walk(m);
            return;
        }
        for (const auto& a : u.args()) walk(a);
    };
    for (const auto& t : ts) walk(t);
    if (escapes) throw Error(ErrorCode::KeyEscapes, "key " + key + " occurs outside a hash key position");
    return out;
}

Term rebuild(const Term& app, TermList args) {
    if (!app.is_app()) throw Error(ErrorCode::InvalidPosition, "cannot rebuild a leaf");
    bool same = args.size() == app.arity();
    for (std::size_t i = 0; same && i < args.size(); ++i) same = args[i] == app.arg(i);
    if (same) return app;
    return mk_term(app.symbol(), std::move(args));
}

Term substitute(const Term& t, const std::map<std::string, Term>& binding) {
    TermMap<Term> memo;
    std::function<Term(const Term&)> go = [&](const Term& u) -> Term {
        if (u.ground()) return u;
        if (auto it = memo.find(u); it != memo.end()) return it->second;
        Term r;
        if (u.is_metavar()) {
            auto b = binding.find(u.id());
            if (b == binding.end()) {
                r = u;
            } else {
                if (!sort_leq(b->second.sort(), u.sort()))
                    throw Error(ErrorCode::SortMismatch, "cannot bind " + u.id() + " : " +
                                                             std::string(sort_name(u.sort())) + " to a term of sort " +
                                                             std::string(sort_name(b->second.sort())));
                r = b->second;
            }
        } else {
            TermList args;
            args.reserve(u.arity());
            for (const auto& a : u.args()) args.push_back(go(a));
            r = rebuild(u, std::move(args));
        }
        memo.emplace(u, r);
        return r;
    };
    return go(t);
}

const Term& subterm_at(const Term& t, const Path& p) {
    const Term* cur = &t;
    for (std::size_t i : p) {
        if (!cur->is_app() || i >= cur->arity())
            throw Error(ErrorCode::InvalidPosition, "no subterm at " + path_to_string(p));
        cur = &cur->arg(i);
    }
    return *cur;
}

Term replace_at(const Term& t, const Path& p, const Term& with) {
    std::function<Term(const Term&, std::size_t)> go = [&](const Term& u, std::size_t depth) -> Term {
        if (depth == p.size()) return with;
        if (!u.is_app() || p[depth] >= u.arity())
            throw Error(ErrorCode::InvalidPosition, "no subterm at " + path_to_string(p));
        TermList args = u.args();
        args[p[depth]] = go(u.arg(p[depth]), depth + 1);
        return rebuild(u, std::move(args));
    };
    return go(t, 0);
}

Term replace_all(const Term& t, const Term& from, const Term& to) {
    TermMap<Term> memo;
    std::function<Term(const Term&)> go = [&](const Term& u) -> Term {
        if (u == from) return to;
        if (!u.is_app() || u.size() < from.size()) return u;
        if (auto it = memo.find(u); it != memo.end()) return it->second;
        TermList args;
        args.reserve(u.arity());
        for (const auto& a : u.args()) args.push_back(go(a));
        Term r = rebuild(u, std::move(args));
        memo.emplace(u, r);
        return r;
    };
    return go(t);
}

Term Context::plug(const Term& t) const {
    if (!sort_leq(t.sort(), hole_sort))
        throw Error(ErrorCode::SortMismatch, "plugged term does not fit the hole sort");
    return substitute(term, {{"HOLE", t}});
}

Context Context::make(const Term& with_hole) {
    int count = 0;
    std::optional<Sort> s;
    std::function<void(const Term&)> walk = [&](const Term& u) {
        if (u.is_metavar() && u.id() == "HOLE") {
            ++count;
            s = u.sort();
        }
        for (const auto& a : u.args()) walk(a);
    };
    walk(with_hole);
    if (count != 1) throw Error(ErrorCode::ShapeMismatch, "a context needs exactly one HOLE");
    return Context{with_hole, *s};
}

bool sort_sound(const Term& t) {
    bool ok = true;
    visit_dag(t, [&](const Term& u) {
        if (!ok || !u.is_app()) return false;
        try {
            Term again = mk_term(u.symbol(), u.args());
            if (again.sort() != u.sort()) ok = false;
        } catch (const Error&) {
            ok = false;
        }
        return ok;
    });
    return ok;
}

std::string path_to_string(const Path& p) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << ']';
    return os.str();
}

}  // namespace bcsa
