#pragma once

#include "bcsa/term.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcsa {

// Resolves identifiers while parsing. The default implementation is Env.
class Scope {
public:
    virtual ~Scope() = default;
    virtual const Signature& sig() const = 0;
    // bare identifier that is not a declared name or 0-ary symbol
    virtual std::optional<Term> ident(const std::string& id) const { (void)id; return std::nullopt; }
    // `@id` inside an argument list or frame
    virtual std::optional<TermList> splice(const std::string& id) const { (void)id; return std::nullopt; }
    // f(args) where f is not a symbol
    virtual std::optional<Term> macro(const std::string& f, const TermList& args) const {
        (void)f; (void)args;
        return std::nullopt;
    }
};

class Env : public Scope {
public:
    Env() = default;
    explicit Env(Signature s) : sig_(std::move(s)) {}

    const Signature& sig() const override { return sig_; }
    Signature& sig_mut() { return sig_; }

    std::optional<Term> ident(const std::string& id) const override;
    std::optional<TermList> splice(const std::string& id) const override;

    void let(const std::string& id, const Term& t);
    void let_list(const std::string& id, TermList ts);
    const std::map<std::string, Term>& lets() const { return lets_; }
    std::vector<std::string> let_order() const { return order_; }

private:
    Signature sig_;
    std::map<std::string, Term> lets_;
    std::map<std::string, TermList> lists_;
    std::vector<std::string> order_;
};

struct SrcPos {
    int line = 1;
    int col = 1;
};

[[noreturn]] void parse_fail(SrcPos at, const std::string& msg);

Term parse_term(std::string_view text, const Scope& scope, SrcPos origin = {});
// comma separated, `@x` splices allowed; empty text gives an empty list
TermList parse_term_list(std::string_view text, const Scope& scope, SrcPos origin = {});

// Canonical printer. Subterms found in `abbrev` are printed as the mapped identifier.
std::string print_term(const Term& t, const TermMap<std::string>* abbrev = nullptr);
std::string print_terms(const TermList& ts, const TermMap<std::string>* abbrev = nullptr);

// A header statement: a line starting at column 1 plus any indented continuation lines.
struct Statement {
    std::string keyword;
    std::string rest;
    SrcPos pos;       // of the keyword
    SrcPos rest_pos;  // of the first character of `rest`
};

std::vector<Statement> split_statements(std::string_view text);

// Handles names / constant / label / adversarial / function / let.
// Returns false when the keyword is not a declaration.
bool apply_declaration(Env& env, const Statement& st);

// Header lines re-declaring every non-builtin symbol and name of `sig`.
std::string print_declarations(const Signature& sig);

std::string read_file(const std::string& path);

}  // namespace bcsa
