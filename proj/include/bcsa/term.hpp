#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace bcsa {

enum class Sort { Bool, Nonce, Message };

bool sort_leq(Sort a, Sort b);
std::string_view sort_name(Sort s);
std::optional<Sort> parse_sort(std::string_view s);

enum class ErrorCode {
    SortMismatch,
    ArityMismatch,
    UnknownSymbol,
    ParseError,
    KeyCycle,
    KeyEscapes,
    InvalidPosition,
    ShapeMismatch,
    SideConditionViolation,
    UnknownAction,
    FreshnessClash,
    IllegalCorruption,
    ContextContainsReservedName,
    UnboundName,
    UnboundSymbol,
    IncompatibleSuite,
    ConfigError,
};

std::string_view error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg);
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

enum class SymKind { Honest, Adversarial };

struct Typing {
    std::vector<Sort> args;
    Sort result;
};

struct Symbol {
    std::string name;
    SymKind kind = SymKind::Honest;
    std::vector<Typing> typings;  // most specific first
    bool variadic = false;        // adversarial symbols: Msg^k -> result for any k
    Sort variadic_result = Sort::Message;
    bool label = false;           // distinguished constant; distinct labels are unequal
};

using SymbolPtr = std::shared_ptr<const Symbol>;

enum class TermKind { Name, MetaVar, App };

class Term;
struct TermFactory;
using TermList = std::vector<Term>;
using Path = std::vector<std::size_t>;

struct TermNode {
    TermKind kind;
    std::string id;  // name or metavariable identifier
    SymbolPtr sym;   // App only
    TermList args;
    Sort sort;
    std::size_t hash;
    std::size_t size;
    bool ground;
};

class Term {
public:
    Term() = default;

    static Term name(const std::string& id);
    static Term metavar(const std::string& id, Sort s);
    // unchecked construction; prefer mk_term
    static Term app_raw(SymbolPtr sym, TermList args, Sort s);

    bool valid() const { return static_cast<bool>(n_); }
    TermKind kind() const { return n_->kind; }
    bool is_name() const { return n_->kind == TermKind::Name; }
    bool is_metavar() const { return n_->kind == TermKind::MetaVar; }
    bool is_app() const { return n_->kind == TermKind::App; }
    bool is_app(std::string_view sym) const;
    const std::string& id() const { return n_->id; }
    const SymbolPtr& symbol() const { return n_->sym; }
    const std::string& head() const;  // symbol name, or identifier for names/metavars
    const TermList& args() const { return n_->args; }
    const Term& arg(std::size_t i) const { return n_->args.at(i); }
    std::size_t arity() const { return n_->args.size(); }
    Sort sort() const { return n_->sort; }
    std::size_t hash() const { return n_->hash; }
    std::size_t size() const { return n_->size; }
    bool ground() const { return n_->ground; }
    const TermNode* ptr() const { return n_.get(); }

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

private:
    friend struct TermFactory;
    static Term from_node(std::shared_ptr<const TermNode> n);
    explicit Term(std::shared_ptr<const TermNode> n) : n_(std::move(n)) {}
    std::shared_ptr<const TermNode> n_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

template <class V>
using TermMap = std::unordered_map<Term, V, TermHash>;
using TermSet = std::unordered_set<Term, TermHash>;

// Total canonical order: head name, then kind, then arguments lexicographically.
int compare_terms(const Term& a, const Term& b);
struct TermLess {
    bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b) < 0; }
};

// Symbol table with the built-in honest symbols pre-declared.
class Signature {
public:
    Signature();

    SymbolPtr lookup(std::string_view name) const;
    SymbolPtr require(std::string_view name) const;
    bool has(std::string_view name) const;

    SymbolPtr declare_function(const std::string& name, std::vector<Sort> args, Sort result);
    SymbolPtr declare_constant(const std::string& name, Sort s);
    SymbolPtr declare_label(const std::string& name);
    SymbolPtr declare_adversarial(const std::string& name, Sort result = Sort::Message);

    void declare_name(const std::string& id);
    bool is_name(std::string_view id) const;
    const std::set<std::string>& names() const { return names_; }
    std::vector<SymbolPtr> symbols() const;
    std::vector<SymbolPtr> declared_symbols() const;  // non-builtin, in declaration order

    static bool is_builtin(std::string_view name);

private:
    SymbolPtr add(Symbol s);
    std::map<std::string, SymbolPtr, std::less<>> table_;
    std::vector<SymbolPtr> order_;
    std::set<std::string> names_;
};

const Signature& builtin_signature();

Term mk_term(const SymbolPtr& sym, TermList args);
Term mk(std::string_view builtin, TermList args);  // built-in symbols only

// Convenience builders over built-ins.
Term t_true();
Term t_false();
Term t_zero();
Term t_eq(const Term& a, const Term& b);
Term t_ite(const Term& b, const Term& x, const Term& y);
Term t_xor(const Term& a, const Term& b);
Term t_pair(const Term& a, const Term& b);
Term t_hash(const Term& m, const Term& k);

bool occurs(const std::string& name, const Term& t);
bool occurs_in(const std::string& name, const TermList& ts);
std::set<std::string> names_of(const Term& t);
bool contains_subterm(const Term& t, const Term& sub);

bool key_only_in_key_position(const std::string& key, const TermList& ts);
// Distinct first arguments of hash(., key), leftmost-outermost first occurrence.
TermList hashed_arguments(const std::string& key, const TermList& ts);

Term substitute(const Term& t, const std::map<std::string, Term>& binding);

const Term& subterm_at(const Term& t, const Path& p);
Term replace_at(const Term& t, const Path& p, const Term& with);
// Replace every occurrence of `from` (structural) by `to`.
Term replace_all(const Term& t, const Term& from, const Term& to);
// Rebuilds an application with new arguments, re-checking sorts.
Term rebuild(const Term& app, TermList args);

struct Context {
    Term term;  // contains exactly one metavariable named HOLE
    Sort hole_sort;
    Term plug(const Term& t) const;
    static Context make(const Term& with_hole);
};

bool sort_sound(const Term& t);

std::string path_to_string(const Path& p);

}  // namespace bcsa
