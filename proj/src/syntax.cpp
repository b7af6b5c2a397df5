#include "bcsa/syntax.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace bcsa {

std::optional<Term> Env::ident(const std::string& id) const {
    auto it = lets_.find(id);
    if (it != lets_.end()) return it->second;
    return std::nullopt;
}

std::optional<TermList> Env::splice(const std::string& id) const {
    auto it = lists_.find(id);
    if (it != lists_.end()) return it->second;
    auto l = lets_.find(id);
    if (l != lets_.end()) return TermList{l->second};
    return std::nullopt;
}

void Env::let(const std::string& id, const Term& t) {
    if (sig_.has(id) || sig_.is_name(id))
        throw Error(ErrorCode::ConfigError, "let '" + id + "' shadows a declaration");
    if (!lets_.count(id)) order_.push_back(id);
    lets_[id] = t;
}

void Env::let_list(const std::string& id, TermList ts) { lists_[id] = std::move(ts); }

void parse_fail(SrcPos at, const std::string& msg) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(at.line) + ", col " + std::to_string(at.col) + ": " + msg);
}

namespace {

enum class Tok { Ident, Number, LParen, RParen, LAngle, RAngle, Comma, Xor, At, Question, Colon, Range, End };

struct Token {
    Tok kind;
    std::string text;
    SrcPos pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view s, SrcPos origin) {
    std::vector<Token> out;
    SrcPos p = origin;
    std::size_t i = 0;
    auto adv = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
            if (s[i] == '\n') {
                ++p.line;
                p.col = 1;
            } else {
                ++p.col;
            }
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        if (c == ';') {  // comment to end of line
            while (i < s.size() && s[i] != '\n') adv(1);
            continue;
        }
        SrcPos at = p;
        if (s.substr(i, 3) == "(+)") {
            out.push_back({Tok::Xor, "(+)", at});
            adv(3);
        } else if (s.substr(i, 2) == "..") {
            out.push_back({Tok::Range, "..", at});
            adv(2);
        } else if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), at});
            adv(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Number, std::string(s.substr(i, j - i)), at});
            adv(j - i);
        } else {
            Tok k;
            switch (c) {
                case '(': k = Tok::LParen; break;
                case ')': k = Tok::RParen; break;
                case '<': k = Tok::LAngle; break;
                case '>': k = Tok::RAngle; break;
                case ',': k = Tok::Comma; break;
                case '@': k = Tok::At; break;
                case '?': k = Tok::Question; break;
                case ':': k = Tok::Colon; break;
                default: parse_fail(at, std::string("unexpected character '") + c + "'");
            }
            out.push_back({k, std::string(1, c), at});
            adv(1);
        }
    }
    out.push_back({Tok::End, "", p});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const Scope& scope) : toks_(std::move(toks)), scope_(scope) {}

    Term term() {
        Term left = primary();
        if (peek().kind == Tok::Xor) {
            SrcPos at = next().pos;
            Term right = term();
            return build(at, [&] { return t_xor(left, right); });
        }
        return left;
    }

    TermList list_until(Tok end) {
        TermList out;
        if (peek().kind == end) return out;
        for (;;) {
            item(out);
            if (peek().kind == Tok::Comma) {
                next();
                continue;
            }
            break;
        }
        return out;
    }

    void expect_end() {
        if (peek().kind != Tok::End) parse_fail(peek().pos, "unexpected '" + peek().text + "'");
    }

    const Token& peek() const { return toks_[pos_]; }

private:
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) parse_fail(peek().pos, std::string("expected ") + what);
        return next();
    }

    template <class F>
    Term build(SrcPos at, F&& f) {
        try {
            return f();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            parse_fail(at, e.what());
        }
    }

    // one argument-list entry; `@x` and `@x1..3` splice
    void item(TermList& out) {
        if (peek().kind != Tok::At) {
            out.push_back(term());
            return;
        }
        SrcPos at = next().pos;
        std::string id = expect(Tok::Ident, "identifier after '@'").text;
        if (peek().kind == Tok::Range) {
            next();
            std::string hi = expect(Tok::Number, "range bound").text;
            std::size_t k = id.size();
            while (k > 0 && std::isdigit(static_cast<unsigned char>(id[k - 1]))) --k;
            if (k == id.size()) parse_fail(at, "range start must end in digits");
            int lo = std::stoi(id.substr(k)), up = std::stoi(hi);
            std::string stem = id.substr(0, k);
            for (int v = lo; v <= up; ++v) splice_one(at, stem + std::to_string(v), out);
            return;
        }
        splice_one(at, id, out);
    }

    void splice_one(SrcPos at, const std::string& id, TermList& out) {
        auto ts = scope_.splice(id);
        if (!ts) parse_fail(at, "unknown splice '@" + id + "'");
        out.insert(out.end(), ts->begin(), ts->end());
    }

    Term primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::LParen: {
                next();
                Term inner = term();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::LAngle: {
                SrcPos at = next().pos;
                Term a = term();
                expect(Tok::Comma, "',' in pair");
                Term b = term();
                expect(Tok::RAngle, "'>'");
                return build(at, [&] { return t_pair(a, b); });
            }
            case Tok::Number: {
                if (t.text != "0") parse_fail(t.pos, "only the numeral 0 is a term");
                next();
                return t_zero();
            }
            case Tok::At: {
                TermList one;
                SrcPos at = t.pos;
                item(one);
                if (one.size() != 1) parse_fail(at, "splice outside an argument list must be a single term");
                return one[0];
            }
            case Tok::Question: {
                next();
                std::string id = expect(Tok::Ident, "metavariable name").text;
                Sort s = Sort::Message;
                if (peek().kind == Tok::Colon) {
                    next();
                    const Token& st = expect(Tok::Ident, "sort");
                    auto ps = parse_sort(st.text);
                    if (!ps) parse_fail(st.pos, "unknown sort '" + st.text + "'");
                    s = *ps;
                }
                return Term::metavar(id, s);
            }
            case Tok::Ident: return application();
            default: parse_fail(t.pos, t.kind == Tok::End ? "unexpected end of term" : "unexpected '" + t.text + "'");
        }
    }

    Term application() {
        Token id = next();
        const Signature& sig = scope_.sig();
        if (peek().kind != Tok::LParen) {
            if (auto v = scope_.ident(id.text)) return *v;
            if (sig.is_name(id.text)) return Term::name(id.text);
            if (auto sym = sig.lookup(id.text)) return build(id.pos, [&] { return mk_term(sym, {}); });
            parse_fail(id.pos, "unknown identifier '" + id.text + "'");
        }
        next();
        TermList args = list_until(Tok::RParen);
        expect(Tok::RParen, "')'");
        if (auto sym = sig.lookup(id.text)) return build(id.pos, [&] { return mk_term(sym, args); });
        if (auto m = build(id.pos, [&] { return scope_.macro(id.text, args).value_or(Term()); }); m.valid())
            return m;
        if (auto d = connective(id, args)) return *d;
        parse_fail(id.pos, "unknown function symbol '" + id.text + "'");
    }

    // boolean shorthands, desugared to conditionals
    std::optional<Term> connective(const Token& id, const TermList& args) {
        auto need_bool = [&] {
            for (const auto& a : args)
                if (a.sort() != Sort::Bool) parse_fail(id.pos, id.text + " expects Bool arguments");
        };
        if (id.text == "or" || id.text == "and") {
            if (args.empty()) return id.text == "or" ? t_false() : t_true();
            need_bool();
            Term acc = args.back();
            for (std::size_t i = args.size() - 1; i-- > 0;)
                acc = id.text == "or" ? t_ite(args[i], t_true(), acc) : t_ite(args[i], acc, t_false());
            return acc;
        }
        if (id.text == "not") {
            if (args.size() != 1) parse_fail(id.pos, "not takes one argument");
            need_bool();
            return t_ite(args[0], t_false(), t_true());
        }
        return std::nullopt;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Scope& scope_;
};

}  // namespace

Term parse_term(std::string_view text, const Scope& scope, SrcPos origin) {
    Parser p(lex(text, origin), scope);
    Term t = p.term();
    p.expect_end();
    return t;
}

TermList parse_term_list(std::string_view text, const Scope& scope, SrcPos origin) {
    Parser p(lex(text, origin), scope);
    TermList ts = p.list_until(Tok::End);
    p.expect_end();
    return ts;
}

// ---------------------------------------------------------------------------

namespace {

void print_rec(std::string& out, const Term& t, const TermMap<std::string>* ab, bool root) {
    if (!root && ab) {
        auto it = ab->find(t);
        if (it != ab->end()) {
            out += it->second;
            return;
        }
    }
    switch (t.kind()) {
        case TermKind::Name: out += t.id(); return;
        case TermKind::MetaVar:
            out += '?';
            out += t.id();
            if (t.sort() != Sort::Message) {
                out += ':';
                out += sort_name(t.sort());
            }
            return;
        case TermKind::App: break;
    }
    const std::string& f = t.head();
    if (f == "xor" && t.arity() == 2) {
        bool paren = t.arg(0).is_app("xor") && !(ab && ab->count(t.arg(0)));
        if (paren) out += '(';
        print_rec(out, t.arg(0), ab, false);
        if (paren) out += ')';
        out += " (+) ";
        print_rec(out, t.arg(1), ab, false);
        return;
    }
    if (f == "pair" && t.arity() == 2) {
        out += '<';
        print_rec(out, t.arg(0), ab, false);
        out += ", ";
        print_rec(out, t.arg(1), ab, false);
        out += '>';
        return;
    }
    out += f;
    if (t.arity() == 0) return;
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) out += ", ";
        print_rec(out, t.arg(i), ab, false);
    }
    out += ')';
}

}  // namespace

std::string print_term(const Term& t, const TermMap<std::string>* abbrev) {
    std::string out;
    print_rec(out, t, abbrev, true);
    return out;
}

std::string print_terms(const TermList& ts, const TermMap<std::string>* abbrev) {
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) out += ", ";
        // elements that are themselves abbreviated print as their name
        if (abbrev) {
            auto it = abbrev->find(ts[i]);
            if (it != abbrev->end()) {
                out += it->second;
                continue;
            }
        }
        print_rec(out, ts[i], abbrev, true);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Statement> split_statements(std::string_view text) {
    std::vector<Statement> out;
    int line = 0;
    std::size_t i = 0;
    while (i <= text.size()) {
        std::size_t e = text.find('\n', i);
        if (e == std::string_view::npos) e = text.size();
        std::string_view raw = text.substr(i, e - i);
        ++line;
        std::size_t content_end = raw.find(';');
        std::string_view body = raw.substr(0, content_end == std::string_view::npos ? raw.size() : content_end);
        bool blank = body.find_first_not_of(" \t\r") == std::string_view::npos;
        if (!blank) {
            bool continuation = body[0] == ' ' || body[0] == '\t';
            if (continuation) {
                if (out.empty()) parse_fail({line, 1}, "indented line with no statement to continue");
                out.back().rest += '\n';
                out.back().rest += std::string(raw);
            } else {
                std::size_t k = 0;
                while (k < raw.size() && !std::isspace(static_cast<unsigned char>(raw[k]))) ++k;
                Statement st;
                st.keyword = std::string(raw.substr(0, k));
                st.pos = {line, 1};
                std::size_t r = k;
                while (r < raw.size() && (raw[r] == ' ' || raw[r] == '\t')) ++r;
                st.rest = std::string(raw.substr(r));
                st.rest_pos = {line, static_cast<int>(r) + 1};
                out.push_back(std::move(st));
            }
        }
        if (e == text.size()) break;
        i = e + 1;
    }
    return out;
}

namespace {

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) {
        if (w[0] == ';') break;
        out.push_back(w);
    }
    return out;
}

std::string strip_comment(const std::string& s) {
    std::string out;
    std::istringstream is(s);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!first) out += '\n';
        first = false;
        out += line.substr(0, line.find(';'));
    }
    return out;
}

Sort sort_or_fail(const std::string& w, SrcPos at) {
    auto s = parse_sort(w);
    if (!s) parse_fail(at, "unknown sort '" + w + "'");
    return *s;
}

// "a b c : Sort" -> ids + sort (sort optional)
std::pair<std::vector<std::string>, std::optional<Sort>> ids_with_sort(const Statement& st) {
    std::string body = strip_comment(st.rest);
    std::optional<Sort> sort;
    auto colon = body.find(':');
    if (colon != std::string::npos) {
        auto ws = words(body.substr(colon + 1));
        if (ws.size() != 1) parse_fail(st.rest_pos, "expected one sort after ':'");
        sort = sort_or_fail(ws[0], st.rest_pos);
        body = body.substr(0, colon);
    }
    return {words(body), sort};
}

}  // namespace

bool apply_declaration(Env& env, const Statement& st) {
    auto guard = [&](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            parse_fail(st.pos, e.what());
        }
    };
    Signature& sig = env.sig_mut();
    if (st.keyword == "names") {
        guard([&] {
            for (const auto& w : words(strip_comment(st.rest))) sig.declare_name(w);
        });
        return true;
    }
    if (st.keyword == "constant") {
        auto [ids, sort] = ids_with_sort(st);
        guard([&] {
            for (const auto& w : ids) sig.declare_constant(w, sort.value_or(Sort::Message));
        });
        return true;
    }
    if (st.keyword == "label") {
        guard([&] {
            for (const auto& w : words(strip_comment(st.rest))) sig.declare_label(w);
        });
        return true;
    }
    if (st.keyword == "adversarial") {
        auto [ids, sort] = ids_with_sort(st);
        guard([&] {
            for (const auto& w : ids) sig.declare_adversarial(w, sort.value_or(Sort::Message));
        });
        return true;
    }
    if (st.keyword == "function") {
        // function f : Msg, Nonce -> Msg
        std::string body = strip_comment(st.rest);
        auto colon = body.find(':');
        auto arrow = body.find("->");
        if (colon == std::string::npos || arrow == std::string::npos || arrow < colon)
            parse_fail(st.rest_pos, "expected 'function f : S1, S2 -> S'");
        auto name = words(body.substr(0, colon));
        if (name.size() != 1) parse_fail(st.rest_pos, "expected one function name");
        std::vector<Sort> args;
        std::string argtxt = body.substr(colon + 1, arrow - colon - 1);
        for (char& c : argtxt)
            if (c == ',') c = ' ';
        for (const auto& w : words(argtxt)) args.push_back(sort_or_fail(w, st.rest_pos));
        auto res = words(body.substr(arrow + 2));
        if (res.size() != 1) parse_fail(st.rest_pos, "expected one result sort");
        Sort r = sort_or_fail(res[0], st.rest_pos);
        guard([&] { sig.declare_function(name[0], args, r); });
        return true;
    }
    if (st.keyword == "let") {
        auto eq = st.rest.find('=');
        if (eq == std::string::npos) parse_fail(st.rest_pos, "expected 'let x = term'");
        auto id = words(st.rest.substr(0, eq));
        if (id.size() != 1) parse_fail(st.rest_pos, "expected one identifier before '='");
        SrcPos tp = st.rest_pos;
        tp.col += static_cast<int>(eq) + 1;
        Term t = parse_term(std::string_view(st.rest).substr(eq + 1), env, tp);
        guard([&] { env.let(id[0], t); });
        return true;
    }
    return false;
}

std::string print_declarations(const Signature& sig) {
    std::ostringstream os;
    if (!sig.names().empty()) {
        os << "names";
        for (const auto& n : sig.names()) os << ' ' << n;
        os << '\n';
    }
    std::vector<std::string> labels;
    for (const auto& s : sig.declared_symbols()) {
        if (s->label) {
            labels.push_back(s->name);
        } else if (s->kind == SymKind::Adversarial) {
            os << "adversarial " << s->name;
            if (s->variadic_result != Sort::Message) os << " : " << sort_name(s->variadic_result);
            os << '\n';
        } else if (s->typings.size() == 1 && s->typings[0].args.empty()) {
            os << "constant " << s->name << " : " << sort_name(s->typings[0].result) << '\n';
        } else {
            os << "function " << s->name << " :";
            const auto& ty = s->typings.at(0);
            for (std::size_t i = 0; i < ty.args.size(); ++i) os << (i ? ", " : " ") << sort_name(ty.args[i]);
            os << " -> " << sort_name(ty.result) << '\n';
        }
    }
    if (!labels.empty()) {
        os << "label";
        for (const auto& l : labels) os << ' ' << l;
        os << '\n';
    }
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace bcsa
