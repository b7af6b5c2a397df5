#include "bcsa/goal.hpp"

#include "bcsa/normalize.hpp"

#include <sstream>

namespace bcsa {

void Goal::validate() const {
    if (left.size() != right.size())
        throw Error(ErrorCode::ShapeMismatch, "sides have " + std::to_string(left.size()) + " and " +
                                                  std::to_string(right.size()) + " elements");
    for (std::size_t i = 0; i < left.size(); ++i) {
        // Msg and Nonce elements may face each other, since normalizing can lower a least sort
        if (!sort_leq(left[i].sort(), right[i].sort()) && !sort_leq(right[i].sort(), left[i].sort()))
            throw Error(ErrorCode::SortMismatch, "position " + std::to_string(i + 1) + " has sorts " +
                                                     std::string(sort_name(left[i].sort())) + " and " +
                                                     std::string(sort_name(right[i].sort())));
        if (!left[i].ground() || !right[i].ground())
            throw Error(ErrorCode::ShapeMismatch, "position " + std::to_string(i + 1) + " is not ground");
    }
}

Goal parse_goal(std::string_view text, const Scope& scope, SrcPos origin) {
    auto tilde = text.find('~');
    if (tilde == std::string_view::npos) parse_fail(origin, "expected '~' in goal");
    if (text.find('~', tilde + 1) != std::string_view::npos) parse_fail(origin, "more than one '~' in goal");
    SrcPos rp = origin;
    for (std::size_t i = 0; i <= tilde; ++i) {
        if (text[i] == '\n') {
            ++rp.line;
            rp.col = 1;
        } else {
            ++rp.col;
        }
    }
    Goal g;
    g.left = parse_term_list(text.substr(0, tilde), scope, origin);
    g.right = parse_term_list(text.substr(tilde + 1), scope, rp);
    try {
        g.validate();
    } catch (const Error& e) {
        parse_fail(origin, e.what());
    }
    return g;
}

std::string print_goal(const Goal& g, const TermMap<std::string>* abbrev) {
    return print_terms(g.left, abbrev) + " ~ " + print_terms(g.right, abbrev);
}

bool goals_match(const Goal& a, const Goal& b) {
    if (a.size() != b.size() || a.right.size() != b.right.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_modulo(a.left[i], b.left[i]) || !same_modulo(a.right[i], b.right[i])) return false;
    return true;
}

const Goal& GoalFile::get(const std::string& name) const {
    for (const auto& [n, g] : goals)
        if (n == name) return g;
    throw Error(ErrorCode::ConfigError, "no goal named '" + name + "'");
}

const Goal& GoalFile::first() const {
    if (goals.empty()) throw Error(ErrorCode::ConfigError, "goal file declares no goal");
    return goals.front().second;
}

GoalFile parse_goal_file(std::string_view text) {
    GoalFile gf;
    for (const auto& st : split_statements(text)) {
        if (apply_declaration(gf.env, st)) continue;
        if (st.keyword != "goal") parse_fail(st.pos, "unknown statement '" + st.keyword + "'");
        auto colon = st.rest.find(':');
        if (colon == std::string::npos) parse_fail(st.rest_pos, "expected 'goal NAME : ...'");
        std::istringstream is(st.rest.substr(0, colon));
        std::string name, extra;
        is >> name >> extra;
        if (name.empty() || !extra.empty()) parse_fail(st.rest_pos, "expected one goal name");
        SrcPos at = st.rest_pos;
        at.col += static_cast<int>(colon) + 1;
        gf.goals.emplace_back(name, parse_goal(std::string_view(st.rest).substr(colon + 1), gf.env, at));
    }
    if (gf.goals.empty()) throw Error(ErrorCode::ParseError, "goal file declares no goal");
    return gf;
}

GoalFile load_goal_file(const std::string& path) { return parse_goal_file(read_file(path)); }

std::vector<std::pair<std::string, Term>> goal_abbreviations(const Goal& g) {
    std::vector<std::pair<std::string, Term>> out;
    TermMap<bool> seen;
    auto define = [&](const Term& t, const std::string& id) {
        if (t.size() == 1 || seen.count(t)) return;
        seen.emplace(t, true);
        out.emplace_back(id, t);
    };
    for (std::size_t i = 0; i < g.left.size(); ++i) define(g.left[i], "l" + std::to_string(i + 1));
    for (std::size_t i = 0; i < g.right.size(); ++i) define(g.right[i], "r" + std::to_string(i + 1));
    return out;
}

std::string write_goal_file(const Signature& sig, const std::string& name, const Goal& g,
                            const std::vector<std::string>& comments) {
    std::ostringstream os;
    for (const auto& c : comments) os << "; " << c << '\n';
    os << print_declarations(sig);
    TermMap<std::string> ab;
    for (const auto& [id, t] : goal_abbreviations(g)) {
        os << "let " << id << " = " << print_term(t, &ab) << '\n';
        ab.emplace(t, id);
    }
    os << "goal " << name << " : " << print_goal(g, &ab) << '\n';
    return os.str();
}

}  // namespace bcsa
