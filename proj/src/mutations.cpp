#include "bcsa/builders.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace bcsa {

namespace {

Value I(std::size_t v) { return Value::integer(static_cast<long long>(v)); }
Value S(std::string s) { return Value::str(std::move(s)); }
Value Id(std::string s) { return Value::ident(std::move(s)); }

struct Site {
    std::vector<std::size_t> path;
    const ProofNode* node;
    Goal goal;
};

// every node of an accepted script with the goal it is applied to, in pre-order
void collect_sites(const ProofNode& n, const Goal& g, const Env& env, std::vector<std::size_t>& path,
                   std::vector<Site>& out) {
    out.push_back({path, &n, g});
    auto prem = apply_rule(n.rule, g, env);
    for (std::size_t i = 0; i < prem.size() && i < n.children.size(); ++i) {
        path.push_back(i);
        collect_sites(n.children[i], prem[i], env, path, out);
        path.pop_back();
    }
}

ProofNode& node_at(ProofNode& root, const std::vector<std::size_t>& path) {
    ProofNode* cur = &root;
    for (std::size_t i : path) cur = &cur->children.at(i);
    return *cur;
}

std::string path_text(const std::vector<std::size_t>& path) {
    std::string out = "root";
    for (std::size_t i : path) out += "." + std::to_string(i);
    return out;
}

void names_in(const Term& t, std::set<std::string>& out) {
    if (t.is_name()) out.insert(t.id());
    if (t.is_app())
        for (const auto& a : t.args()) names_in(a, out);
}

// "ite(EQ(..), 0, REST)" -> "REST"
std::string drop_outer_guard(const std::string& text) {
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        if (text[i] == ')') --depth;
        if (depth == 1 && text.compare(i, 5, ", 0, ") == 0) return text.substr(i + 5, text.size() - i - 6);
    }
    return text;
}

}  // namespace

std::vector<Mutation> mutate_proof(const ProofScript& valid, const Goal& goal, const Env& env) {
    Env scope = env;
    for (const auto& n : valid.fresh_names)
        if (!scope.sig().is_name(n)) scope.sig_mut().declare_name(n);
    std::vector<Site> sites;
    std::vector<std::size_t> root_path;
    collect_sites(valid.root, goal, scope, root_path, sites);

    std::vector<Mutation> out;
    auto first = [&](const std::function<bool(const Site&)>& pred) -> const Site* {
        for (const auto& s : sites)
            if (pred(s)) return &s;
        return nullptr;
    };
    auto kind = [](RuleKind k) { return [k](const Site& s) { return s.node->rule.kind == k; }; };
    auto add = [&](const std::string& name, const std::string& what, const Site& at,
                   const std::function<void(ProofNode&)>& edit, std::vector<std::size_t> expected) {
        Mutation m;
        m.name = name;
        m.description = what;
        m.script = valid;
        edit(node_at(m.script.root, at.path));
        m.expected_path = std::move(expected);
        out.push_back(std::move(m));
    };

    std::set<std::string> goal_names;
    for (const auto& t : goal.left) names_in(t, goal_names);
    for (const auto& t : goal.right) names_in(t, goal_names);
    std::vector<std::string> keys;
    for (const auto& s : sites)
        if (s.node->rule.kind == RuleKind::PRF) {
            std::string k = s.node->rule.params.at("key").text;
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }

    // a nonce dropped as fresh although it also occurs in another element
    if (const Site* s = first(kind(RuleKind::FreshNonce))) {
        std::size_t pick = 0;
        for (std::size_t i = 0; i < s->goal.size() && !pick; ++i) {
            if (!s->goal.left[i].is_name()) continue;
            for (std::size_t j = 0; j < s->goal.size(); ++j)
                if (j != i && occurs(s->goal.left[i].id(), s->goal.left[j])) pick = i + 1;
        }
        if (pick)
            add("fresh_reused", "the dropped nonce also occurs elsewhere in the frame", *s,
                [pick](ProofNode& n) { n.rule.params["pos"] = I(pick); }, s->path);
    }
    if (const Site* s = first(kind(RuleKind::PRF))) {
        std::string reused = *goal_names.begin();
        add("prf_fresh_reused", "the random value of the hash step is a name of the goal", *s,
            [reused](ProofNode& n) { n.rule.params["fresh"] = Id(reused); }, s->path);
    }
    if (keys.size() >= 2) {
        const Site* s = first(kind(RuleKind::PRF));
        std::string key = s->node->rule.params.at("key").text;
        std::string other = key == keys[0] ? keys[1] : keys[0];
        add("prf_wrong_key", "the hash step names the other tag's key", *s,
            [other](ProofNode& n) { n.rule.params["key"] = Id(other); }, s->path);
    }
    // the hash step itself is where the missing test shows
    if (const Site* s = first([](const Site& x) {
            return x.node->rule.kind == RuleKind::Congr && x.node->children.size() == 1 &&
                   x.node->children[0].rule.kind == RuleKind::PRF && x.node->rule.params.count("left") &&
                   x.node->rule.params.at("left").kind == Value::Kind::Str;
        })) {
        auto expected = s->path;
        expected.push_back(0);
        add("guard_dropped", "one equality test is missing before the hash step", *s,
            [](ProofNode& n) {
                n.rule.params["left"] = S(drop_outer_guard(n.rule.params["left"].text));
                n.rule.params["right"] = S(drop_outer_guard(n.rule.params["right"].text));
            },
            expected);
    }
    if (const Site* s = first(kind(RuleKind::FA))) {
        std::size_t past = s->goal.size() + 1;
        add("fa_out_of_range", "function application at a position past the end", *s,
            [past](ProofNode& n) { n.rule.params["pos"] = I(past); }, s->path);
    }
    if (const Site* s = first([](const Site& x) {
            if (x.node->rule.kind != RuleKind::FA) return false;
            for (const auto& t : x.goal.left)
                if (t.is_name()) return true;
            return false;
        })) {
        std::size_t pick = 0;
        for (std::size_t i = 0; i < s->goal.size() && !pick; ++i)
            if (s->goal.left[i].is_name()) pick = i + 1;
        add("fa_on_name", "function application on a nonce", *s,
            [pick](ProofNode& n) { n.rule.params["pos"] = I(pick); }, s->path);
    }
    // frames whose exchange changes what has to be proved
    if (const Site* s = first([&](const Site& x) {
            if (x.node->rule.kind != RuleKind::Trans || x.node->rule.params.at("via").kind != Value::Kind::List)
                return false;
            auto prem = apply_rule(x.node->rule, x.goal, scope);
            return prem.size() == 3 && prem[1].left != prem[1].right;
        })) {
        add("trans_frames_swapped", "the two intermediate frames are given in the wrong order", *s,
            [](ProofNode& n) {
                auto& items = n.rule.params["via"].items;
                std::swap(items.front(), items.back());
            },
            s->path);
    }
    if (const Site* s = first(kind(RuleKind::Trans))) {
        add("trans_child_missing", "a transitivity step with one premise left unproved", *s,
            [](ProofNode& n) { n.children.pop_back(); }, s->path);
    }
    if (const Site* s = first(kind(RuleKind::Perm))) {
        add("perm_order", "a permutation that also exchanges the first two elements", *s,
            [](ProofNode& n) {
                auto& items = n.rule.params["order"].items;
                std::swap(items[0], items[1]);
            },
            s->path);
    }
    if (const Site* s = first(kind(RuleKind::Indep))) {
        std::string name = s->node->rule.params.at("name").text;
        std::string other;
        for (const auto& n : goal_names)
            if (n != name && other.empty()) other = n;
        add("indep_wrong_name", "independence claimed for a name that occurs in the frame", *s,
            [other](ProofNode& n) { n.rule.params["name"] = Id(other); }, s->path);
    }
    if (const Site* s = first(kind(RuleKind::PRF))) {
        add("refl_on_distinct", "reflexivity on sides that differ", *s,
            [](ProofNode& n) {
                n = ProofNode{};
                n.rule.kind = RuleKind::Refl;
            },
            s->path);
    }
    if (const Site* s = first(kind(RuleKind::Dup))) {
        add("dup_not_a_copy", "removal of an element that has no copy", *s,
            [](ProofNode& n) { n.rule.params["pos"] = I(1); }, s->path);
    }
    if (const Site* s = first(kind(RuleKind::Congr))) {
        add("congr_not_equal", "a rewrite into a term that is not equal", *s,
            [](ProofNode& n) {
                auto& v = n.rule.params["left"];
                if (v.kind == Value::Kind::List) {
                    for (auto& x : v.items) x = S("0");
                } else {
                    v = S("0");
                }
            },
            s->path);
    }
    if (const Site* s = first(kind(RuleKind::IfThen))) {
        add("ifthen_wrong_hole", "the rewritten hole does not hold the tested term", *s,
            [](ProofNode& n) { n.rule.params["hole"] = Value::list({I(1)}); }, s->path);
    }
    if (const Site* s = first([](const Site& x) {
            return x.node->rule.kind == RuleKind::PRF && x.node->rule.params.at("pos").num > 1;
        })) {
        add("prf_wrong_position", "the hash step points at the element before the hash", *s,
            [](ProofNode& n) { n.rule.params["pos"] = I(static_cast<std::size_t>(n.rule.params["pos"].num - 1)); },
            s->path);
    }
    if (const Site* s = first(kind(RuleKind::CS))) {
        add("cs_extra_position", "case split over an element without the shared test", *s,
            [](ProofNode& n) {
                auto& v = n.rule.params["pos"];
                if (v.kind != Value::Kind::List) v = Value::list({v});
                v.items.insert(v.items.begin(), I(1));
            },
            s->path);
    }
    return out;
}

std::string write_mutation(const Mutation& m) {
    return "; mutation: " + m.name + "\n; " + m.description + "\n; expect-failure-at: " + path_text(m.expected_path) +
           "\n" + print_script(m.script);
}

std::vector<std::size_t> expected_failure_path(std::string_view text) {
    const std::string_view tag = "; expect-failure-at: ";
    std::size_t at = text.find(tag);
    if (at == std::string_view::npos) throw Error(ErrorCode::ConfigError, "no expect-failure-at line");
    std::size_t from = at + tag.size();
    std::size_t end = text.find('\n', from);
    std::istringstream is(std::string(text.substr(from, end == std::string_view::npos ? end : end - from)));
    std::vector<std::size_t> out;
    std::string part;
    std::getline(is, part, '.');
    if (part != "root") throw Error(ErrorCode::ConfigError, "a failure path starts with root");
    while (std::getline(is, part, '.')) out.push_back(std::stoul(part));
    return out;
}

bool localized(const Verdict& v, const std::vector<std::size_t>& expected) {
    if (v.accepted || !v.failure) return false;
    const auto& got = v.failure->path;
    return got.size() >= expected.size() && std::equal(expected.begin(), expected.end(), got.begin());
}

}  // namespace bcsa
