#include "bcsa/proof.hpp"

#include "bcsa/normalize.hpp"

#include <cctype>
#include <functional>
#include <sstream>

namespace bcsa {

namespace {

// ---- tokenizer -------------------------------------------------------------

enum class Tok { LParen, RParen, LBrack, RBrack, Eq, Int, Ident, Str, End };

struct Token {
    Tok kind;
    std::string text;
    long long num = 0;
    SrcPos pos;
};

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '*' || c == '.' || c == '-' ||
           c == '@';
}

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    SrcPos p;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k && i < s.size(); ++j, ++i) {
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
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            advance(1);
            continue;
        }
        if (c == ';') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        Token t{Tok::End, "", 0, p};
        switch (c) {
            case '(': t.kind = Tok::LParen; advance(1); out.push_back(t); continue;
            case ')': t.kind = Tok::RParen; advance(1); out.push_back(t); continue;
            case '[': t.kind = Tok::LBrack; advance(1); out.push_back(t); continue;
            case ']': t.kind = Tok::RBrack; advance(1); out.push_back(t); continue;
            case '=': t.kind = Tok::Eq; advance(1); out.push_back(t); continue;
            default: break;
        }
        if (c == '"') {
            advance(1);
            std::string text;
            bool closed = false;
            while (i < s.size()) {
                char d = s[i];
                if (d == '\\' && i + 1 < s.size()) {
                    text += s[i + 1];
                    advance(2);
                    continue;
                }
                advance(1);
                if (d == '"') {
                    closed = true;
                    break;
                }
                text += d;
            }
            if (!closed) parse_fail(t.pos, "unterminated string");
            t.kind = Tok::Str;
            t.text = std::move(text);
            out.push_back(t);
            continue;
        }
        bool number = std::isdigit(static_cast<unsigned char>(c)) ||
                      (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])));
        if (number || ident_char(c)) {
            std::size_t j = i + 1;
            while (j < s.size() && ident_char(s[j])) ++j;
            t.text = std::string(s.substr(i, j - i));
            advance(j - i);
            if (number && std::all_of(t.text.begin() + 1, t.text.end(),
                                      [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
                t.kind = Tok::Int;
                t.num = std::stoll(t.text);
            } else {
                t.kind = Tok::Ident;
            }
            out.push_back(t);
            continue;
        }
        parse_fail(p, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", 0, p});
    return out;
}

// ---- parser ----------------------------------------------------------------

class ScriptParser {
public:
    explicit ScriptParser(std::string_view text) : toks_(tokenize(text)) {}

    ProofScript parse() {
        ProofScript s;
        bool have_root = false;
        while (peek().kind != Tok::End) {
            const Token& open = expect(Tok::LParen, "'('");
            const Token& head = expect(Tok::Ident, "a rule or directive name");
            if (head.text == "goal") {
                if (s.goal_name) parse_fail(head.pos, "goal given twice");
                s.goal_name = expect(Tok::Ident, "a goal name").text;
                expect(Tok::RParen, "')'");
            } else if (head.text == "names") {
                while (peek().kind == Tok::Ident) s.fresh_names.push_back(next().text);
                expect(Tok::RParen, "')'");
            } else if (head.text == "let") {
                std::string name = expect(Tok::Ident, "a let name").text;
                const Token& body = expect(Tok::Str, "a quoted term");
                s.lets.emplace_back(name, body.text);
                s.let_pos.push_back(body.pos);
                expect(Tok::RParen, "')'");
            } else if (head.text == "defproof") {
                const Token& name = expect(Tok::Ident, "a proof name");
                expect(Tok::LParen, "'('");
                ProofNode body = node();
                expect(Tok::RParen, "')'");
                defs_[name.text] = std::move(body);
            } else {
                if (have_root) parse_fail(open.pos, "a script holds a single proof tree");
                s.root = node_after_head(head);
                have_root = true;
            }
        }
        if (!have_root) parse_fail(peek().pos, "script contains no proof");
        return s;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    const Token& expect(Tok k, const char* what) {
        const Token& t = next();
        if (t.kind != k) parse_fail(t.pos, std::string("expected ") + what);
        return t;
    }

    // after '(' has been consumed
    ProofNode node() { return node_after_head(expect(Tok::Ident, "a rule name")); }

    ProofNode node_after_head(const Token& head) {
        if (head.text == "use") {
            const Token& name = expect(Tok::Ident, "a proof name");
            auto it = defs_.find(name.text);
            if (it == defs_.end()) parse_fail(name.pos, "no defproof named '" + name.text + "'");
            expect(Tok::RParen, "')'");
            return it->second;
        }
        auto kind = parse_rule_kind(head.text);
        if (!kind) parse_fail(head.pos, "unknown rule '" + head.text + "'");
        ProofNode n;
        n.rule.kind = *kind;
        n.rule.pos = head.pos;
        while (true) {
            const Token& t = peek();
            if (t.kind == Tok::RParen) {
                next();
                return n;
            }
            if (t.kind == Tok::LParen) {
                next();
                n.children.push_back(node());
                continue;
            }
            if (t.kind == Tok::Ident && peek(1).kind == Tok::Eq) {
                std::string key = next().text;
                next();
                if (n.rule.params.count(key) || (key == "expect" && n.expect))
                    parse_fail(t.pos, "parameter '" + key + "' given twice");
                Value v = value();
                if (key == "expect") {
                    if (v.kind != Value::Kind::Str) parse_fail(v.pos, "expect takes a quoted goal");
                    n.expect = v.text;
                    n.expect_pos = v.pos;
                } else {
                    n.rule.params[key] = std::move(v);
                }
                continue;
            }
            parse_fail(t.pos, t.kind == Tok::End ? "missing ')'" : "expected key=value, a subproof or ')'");
        }
    }

    Value value() {
        const Token& t = next();
        Value v;
        switch (t.kind) {
            case Tok::Int: v = Value::integer(t.num); break;
            case Tok::Ident: v = Value::ident(t.text); break;
            case Tok::Str: v = Value::str(t.text); break;
            case Tok::LBrack: {
                std::vector<Value> items;
                while (peek().kind != Tok::RBrack) {
                    if (peek().kind == Tok::End) parse_fail(t.pos, "missing ']'");
                    items.push_back(value());
                }
                next();
                v = Value::list(std::move(items));
                break;
            }
            default: parse_fail(t.pos, "expected a value");
        }
        v.pos = t.pos;
        return v;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, ProofNode> defs_;
};

std::size_t count_nodes(const ProofNode& n) {
    std::size_t k = 1;
    for (const auto& c : n.children) k += count_nodes(c);
    return k;
}

std::string quote(const std::string& s) { return print_value(Value::str(s)); }

void print_node(std::ostream& os, const ProofNode& n, int indent) {
    os << std::string(static_cast<std::size_t>(indent), ' ') << '(' << rule_name(n.rule.kind);
    for (const auto& [k, v] : n.rule.params) os << ' ' << k << '=' << print_value(v);
    if (n.expect) os << " expect=" << quote(*n.expect);
    for (const auto& c : n.children) {
        os << '\n';
        print_node(os, c, indent + 2);
    }
    os << ')';
}

std::string clip(std::string s, std::size_t n = 600) {
    if (s.size() > n) s = s.substr(0, n - 3) + "...";
    return s;
}

// ---- checker ---------------------------------------------------------------

class Checker {
public:
    Checker(const Env& env, Verdict& v) : env_(env), v_(v) {}

    bool run(const ProofNode& node, const Goal& goal, std::vector<std::size_t>& path) {
        std::size_t step = counter_++;
        auto fail = [&](SideConditionReport r) {
            ProofFailure f;
            f.path = path;
            f.step = step;
            f.rule = pretty_rule(node.rule, &goal);
            f.goal = clip(print_goal(goal));
            f.report = std::move(r);
            v_.failure = std::move(f);
            return false;
        };
        auto simple = [&](ErrorCode code, std::string msg) {
            SideConditionReport r;
            r.passed = false;
            r.code = code;
            r.violations.push_back({std::move(msg), ""});
            return fail(std::move(r));
        };
        if (node.expect) {
            Goal want;
            try {
                want = parse_goal(*node.expect, env_, node.expect_pos);
            } catch (const Error& e) {
                return simple(e.code(), e.what());
            }
            if (!goals_match(want, goal)) return simple(ErrorCode::ShapeMismatch, "goal differs from the expected one");
        }
        std::vector<Goal> premises;
        try {
            premises = apply_rule(node.rule, goal, env_);
        } catch (const RuleError& e) {
            return fail(e.report());
        } catch (const Error& e) {
            return simple(e.code(), e.what());
        }
        if (premises.size() != node.children.size())
            return simple(ErrorCode::ShapeMismatch, "rule yields " + std::to_string(premises.size()) +
                                                        " premise(s) but the script gives " +
                                                        std::to_string(node.children.size()));
        ++v_.steps_checked;
        for (std::size_t i = 0; i < premises.size(); ++i) {
            path.push_back(i);
            bool ok = run(node.children[i], premises[i], path);
            path.pop_back();
            if (!ok) return false;
        }
        return true;
    }

private:
    const Env& env_;
    Verdict& v_;
    std::size_t counter_ = 0;
};

}  // namespace

std::size_t ProofScript::node_count() const { return count_nodes(root); }

ProofScript parse_script(std::string_view text) { return ScriptParser(text).parse(); }

ProofScript load_script(const std::string& path) { return parse_script(read_file(path)); }

std::string print_script(const ProofScript& s) {
    std::ostringstream os;
    if (s.goal_name) os << "(goal " << *s.goal_name << ")\n";
    if (!s.fresh_names.empty()) {
        os << "(names";
        for (const auto& n : s.fresh_names) os << ' ' << n;
        os << ")\n";
    }
    for (const auto& [k, v] : s.lets) os << "(let " << k << ' ' << quote(v) << ")\n";
    print_node(os, s.root, 0);
    os << '\n';
    return os.str();
}

std::string ProofFailure::path_string() const {
    std::string out = "root";
    for (std::size_t i : path) out += "." + std::to_string(i);
    return out;
}

std::string Verdict::describe() const {
    std::ostringstream os;
    if (accepted) {
        os << "accepted (" << steps_checked << " steps)";
        return os.str();
    }
    os << "rejected after " << steps_checked << " steps";
    if (failure) {
        os << " at " << failure->path_string() << " (step " << failure->step << ", " << failure->rule
           << "): " << failure->report.describe();
    }
    return os.str();
}

Verdict check_proof(const ProofScript& script, const Goal& goal, const Env& scope) {
    Env env = scope;
    for (const auto& n : script.fresh_names) {
        if (env.sig().has(n) || env.sig().is_name(n)) {
            Verdict v;
            ProofFailure f;
            f.rule = "names";
            f.goal = print_goal(goal);
            f.report.passed = false;
            f.report.code = ErrorCode::FreshnessClash;
            f.report.violations.push_back({"name " + n + " is already declared by the goal", ""});
            v.failure = f;
            return v;
        }
        env.sig_mut().declare_name(n);
    }
    for (std::size_t i = 0; i < script.lets.size(); ++i) {
        const auto& [name, text] = script.lets[i];
        TermList ts = parse_term_list(text, env, i < script.let_pos.size() ? script.let_pos[i] : SrcPos{});
        if (ts.size() == 1)
            env.let(name, ts[0]);
        else
            env.let_list(name, ts);
    }
    Verdict v;
    std::vector<std::size_t> path;
    Checker c(env, v);
    v.accepted = c.run(script.root, goal, path);
    return v;
}

Verdict check_files(const std::string& goal_path, const std::string& proof_path) {
    GoalFile gf = load_goal_file(goal_path);
    ProofScript s = load_script(proof_path);
    const Goal& g = s.goal_name ? gf.get(*s.goal_name) : gf.first();
    return check_proof(s, g, gf.env);
}

// ---- pseudo-random generator separation --------------------------------------

PrngSeparation build_prng_separation(const std::vector<Context>& contexts, const std::string& seed,
                                     const std::string& out_prefix) {
    if (contexts.empty()) throw Error(ErrorCode::ConfigError, "at least one context is needed");
    std::size_t n = contexts.size();
    std::vector<std::string> outs;
    for (std::size_t i = 0; i < n; ++i) outs.push_back(out_prefix + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& r : outs)
            if (occurs(r, contexts[i].term))
                throw Error(ErrorCode::ContextContainsReservedName, "context " + std::to_string(i) + " mentions " + r);
        if (occurs(seed, contexts[i].term))
            throw Error(ErrorCode::ContextContainsReservedName,
                        "context " + std::to_string(i) + " mentions the seed " + seed);
    }

    PrngSeparation out;
    Term s = mk("G", {mk("init", {Term::name(seed)})});
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) s = mk("G", {mk("pi_S", {s})});
        out.goal.left.push_back(contexts[i].plug(mk("pi_o", {s})));
        out.goal.right.push_back(contexts[i].plug(Term::name(outs[i])));
    }
    out.goal.validate();

    // Rules are chained top-down; `cur` tracks the goal each new node is applied to.
    Env env;
    Goal cur = out.goal;
    std::vector<ProofNode> chain;
    auto push = [&](RuleInstance r) {
        auto next = apply_rule(r, cur, env);
        ProofNode node;
        node.rule = std::move(r);
        chain.push_back(std::move(node));
        if (!next.empty()) cur = next[0];
    };
    auto positions = [](const std::vector<std::size_t>& ps) {
        std::vector<Value> v;
        for (std::size_t p : ps) v.push_back(Value::integer(static_cast<long long>(p + 1)));
        return Value::list(std::move(v));
    };

    // FA down to names and the generator outputs
    while (true) {
        std::size_t at = cur.size();
        for (std::size_t i = 0; i < cur.size() && at == cur.size(); ++i) {
            const Term& l = cur.left[i];
            const Term& r = cur.right[i];
            if (l.is_app() && r.is_app() && l.head() == r.head() && l.arity() == r.arity()) at = i;
        }
        if (at == cur.size()) break;
        RuleInstance fa;
        fa.kind = RuleKind::FA;
        fa.set("pos", Value::integer(static_cast<long long>(at + 1)));
        push(fa);
    }

    std::vector<std::size_t> named, cores;
    for (std::size_t i = 0; i < cur.size(); ++i) {
        if (cur.left[i].is_name() && cur.left[i] == cur.right[i])
            named.push_back(i);
        else
            cores.push_back(i);
    }
    std::vector<std::size_t> order = named;
    order.insert(order.end(), cores.begin(), cores.end());
    bool identity = true;
    for (std::size_t i = 0; i < order.size(); ++i) identity = identity && order[i] == i;
    if (!identity) {
        RuleInstance perm;
        perm.kind = RuleKind::Perm;
        perm.set("order", positions(order));
        push(perm);
    }

    std::vector<std::size_t> dups;
    for (std::size_t i = 0; i < named.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (cur.left[i] == cur.left[j]) {
                dups.push_back(i);
                break;
            }
    if (!dups.empty()) {
        RuleInstance dup;
        dup.kind = RuleKind::Dup;
        dup.set("pos", positions(dups));
        push(dup);
    }

    std::size_t distinct = named.size() - dups.size();
    if (distinct > 0) {
        std::vector<std::size_t> all;
        for (std::size_t i = 0; i < distinct; ++i) all.push_back(i);
        RuleInstance fresh;
        fresh.kind = RuleKind::FreshNonce;
        fresh.set("pos", positions(all));
        push(fresh);
    }

    RuleInstance prng;
    prng.kind = RuleKind::PRNG;
    ProofNode leaf;
    leaf.rule = prng;
    ProofNode root = leaf;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        ProofNode parent = *it;
        parent.children.push_back(std::move(root));
        root = std::move(parent);
    }
    out.script.root = std::move(root);
    return out;
}

Verdict check_prng_separation(std::size_t n, const std::vector<Context>& contexts) {
    if (contexts.size() < n + 1)
        throw Error(ErrorCode::ConfigError, "need " + std::to_string(n + 1) + " contexts, got " +
                                                std::to_string(contexts.size()));
    std::vector<Context> used(contexts.begin(), contexts.begin() + static_cast<long>(n + 1));
    PrngSeparation sep = build_prng_separation(used);
    return check_proof(sep.script, sep.goal, Env());
}

ContextFile parse_context_file(std::string_view text) {
    ContextFile cf;
    for (const auto& st : split_statements(text)) {
        if (apply_declaration(cf.env, st)) continue;
        if (st.keyword != "context") parse_fail(st.pos, "unknown statement '" + st.keyword + "'");
        auto colon = st.rest.find(':');
        std::string name = st.rest.substr(0, colon == std::string::npos ? 0 : colon);
        while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
        if (colon == std::string::npos || name.empty()) parse_fail(st.rest_pos, "expected 'context NAME : term'");
        SrcPos at = st.rest_pos;
        at.col += static_cast<int>(colon) + 1;
        Term t = parse_term(std::string_view(st.rest).substr(colon + 1), cf.env, at);
        try {
            cf.contexts.emplace_back(name, Context::make(t));
        } catch (const Error& e) {
            parse_fail(at, e.what());
        }
    }
    return cf;
}

ContextFile load_context_file(const std::string& path) { return parse_context_file(read_file(path)); }

}  // namespace bcsa
