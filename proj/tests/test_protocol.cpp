#include "doctest.h"

#include "bcsa/normalize.hpp"
#include "bcsa/protocol.hpp"

#include <functional>
#include <random>

using namespace bcsa;

namespace {

const ProtocolSpec& spec(const std::string& name) {
    static std::map<std::string, ProtocolSpec> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, load_spec(std::string(BCSA_DATA_DIR) + "/specs/" + name + ".bcspec")).first;
    return it->second;
}

Term T(const Env& env, const std::string& s) { return parse_term(s, env); }

std::size_t count_ite(const Term& t) {
    std::size_t n = t.is_app("ite") ? 1 : 0;
    if (t.is_app())
        for (const auto& a : t.args()) n += count_ite(a);
    return n;
}

std::size_t goal_size(const Goal& g) {
    std::size_t n = 0;
    for (const auto& t : g.left) n += t.size();
    for (const auto& t : g.right) n += t.size();
    return n;
}

TermList drop_last(TermList ts) {
    ts.pop_back();
    return ts;
}

}  // namespace

TEST_CASE("all bundled protocol files load") {
    for (const char* p : {"kcl", "kclp", "lak", "lak_stateless", "lakp"}) {
        CAPTURE(p);
        CHECK_NOTHROW(spec(p));
    }
    CHECK(spec("kcl").challenged_left == "A");
    CHECK(spec("kcl").challenged_right == "B");
}

TEST_CASE("interface enumeration") {
    const auto& s = spec("kcl");
    auto g = s.gamma();
    CHECK(g.size() == 8);
    CHECK(g.front() == "SetKey_A");
    CHECK(g.back() == "ReaderMsg");
    auto second = s.gamma(true);
    CHECK(second.size() == 4);
    CHECK(std::find(second.begin(), second.end(), "SetKey_A") == second.end());
    CHECK(std::find(second.begin(), second.end(), "TagMsg_A") != second.end());
}

TEST_CASE("single actions of the counter-based protocol") {
    const auto& s = spec("kcl");
    Env env = s.env;
    auto sk = action_step(s, env, "SetKey_A", s.init, {});
    CHECK(sk.term == T(env, "<k_A, A>"));
    CHECK(sk.memory.at("x_k_A") == T(env, "g_key_A()"));
    CHECK(sk.memory.at("x_Id_A") == T(env, "g_id_A()"));
    CHECK(sk.memory.at("x_k_B") == s.init.at("x_k_B"));

    Frame phi{T(env, "n_R")};
    auto tm = action_step(s, env, "TagMsg_B", s.init, phi);
    CHECK(tm.term == T(env, "<B (+) n_T, n_T (+) hash(g_TMsg_B(n_R), k_B)>"));
    CHECK(tm.memory == s.init);

    auto ri = action_step(s, env, "ReaderInit", s.init, {});
    CHECK(ri.term == T(env, "<S1, n_R>"));
    CHECK(ri.memory.at("nb") == T(env, "S2"));
    CHECK(nf(ri.memory.at("c_1")) == T(env, "n_R"));
    CHECK(nf(ri.memory.at("c_2")) == T(env, "0"));

    // the second session draws a new nonce under its own name
    auto ri2 = action_step(s, env, "ReaderInit", ri.memory, {ri.term}, {{"n_R", "n_R'"}});
    CHECK(nf(ri2.memory.at("c_2")) == T(env, "n_R'"));
    CHECK(ri2.memory.at("nb") == T(env, "S3"));

    try {
        action_step(s, env, "ReaderInit", ri.memory, {ri.term});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FreshnessClash);
    }
    CHECK_THROWS_AS(action_step(s, env, "Dance_A", s.init, {}), Error);
}

TEST_CASE("folding over a set of actions") {
    const auto& s = spec("kcl");
    Env env = s.env;
    auto one = fold(s, env, {"TagMsg_A"}, s.init, {});
    CHECK(one.term == action_step(s, env, "TagMsg_A", s.init, {}).term);
    CHECK(count_ite(one.term) == 0);

    auto two = fold(s, env, {"SetKey_A", "ReaderInit"}, s.init, {});
    CHECK(two.term == T(env, "ite(EQ(to(), ReaderInit), <S1, n_R>, <k_A, A>)"));
    CHECK(two.memory.at("nb") == T(env, "ite(EQ(to(), ReaderInit), S2, S1)"));
    CHECK(two.memory.at("x_k_A") == T(env, "ite(EQ(to(), ReaderInit), k_A, g_key_A())"));

    for (std::size_t k = 1; k <= 8; ++k) {
        auto all = s.gamma();
        std::vector<std::string> set(all.begin(), all.begin() + static_cast<long>(k));
        auto r = fold(s, env, set, s.init, {});
        std::size_t top = 0;
        for (Term t = r.term; t.is_app("ite"); t = t.arg(2)) {
            CHECK(t.arg(0).arg(0).is_app("to"));
            ++top;
        }
        CHECK(top == k - 1);
    }
}

TEST_CASE("bounded goals") {
    const auto& s = spec("kcl");
    auto g0 = gen_bounded_goal(s, 0, 0);
    CHECK(print_goal(g0.goal) == "g_guess ~ g_guess");

    auto g1 = gen_bounded_goal(s, 1, 1);
    REQUIRE(g1.goal.size() == 2);
    std::size_t branches = 0;
    for (Term t = g1.goal.left[0]; t.is_app("ite"); t = t.arg(2)) ++branches;
    CHECK(branches + 1 == 8);

    auto g2 = gen_bounded_goal(s, 2, 1);
    std::size_t bounded = goal_size(g2.goal);
    for (const auto& a : s.gamma())
        for (const auto& b : s.gamma(true)) {
            auto fixed = gen_fixed_trace_goal(s, {{a, b}, 1});
            CHECK(goal_size(fixed.goal) < bounded);
        }
    CHECK_THROWS_AS(gen_bounded_goal(s, 1, 2), Error);
}

TEST_CASE("trace errors") {
    const auto& s = spec("kcl");
    auto code_of = [&](const TraceSpec& t) {
        try {
            gen_fixed_trace_goal(s, t);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ConfigError;
    };
    CHECK(code_of({{"ReaderInit", "SetKey_A"}, 1}) == ErrorCode::IllegalCorruption);
    CHECK(code_of({{"TagMsg_B"}, 0}) == ErrorCode::IllegalCorruption);
    CHECK(code_of({{"Teleport"}, 1}) == ErrorCode::UnknownAction);
    CHECK_NOTHROW(gen_fixed_trace_goal(s, {{"SetKey_A", "TagMsg_A"}, 1}));
    CHECK_THROWS_AS(gen_fixed_trace_goal(s, {{"TagMsg_A"}, 3}), Error);
}

TEST_CASE("revised protocol, two sessions with the challenged tag") {
    const auto& s = spec("kclp");
    auto g = gen_fixed_trace_goal(s, parse_trace("ReaderInit, TagMsg_A, ReaderInit, TagMsg_A", 0));
    const Env& env = g.env;
    auto phi = [&](int k) { return print_terms(TermList(g.goal.left.begin(), g.goal.left.begin() + k)); };
    auto phit = [&](int k) { return print_terms(TermList(g.goal.right.begin(), g.goal.right.begin() + k)); };
    Goal expected = parse_goal(
        "n_R, <A (+) hash(n_T, k_A), n_T (+) hash(g(n_R), k_A)>, n_R', "
        "<A (+) hash(n_T', k_A), n_T' (+) hash(g(" + phi(3) + "), k_A)> ~ "
        "n_R, <B (+) hash(n_T, k_B), n_T (+) hash(g(n_R), k_B)>, n_R', "
        "<B (+) hash(n_T', k_B), n_T' (+) hash(g(" + phit(3) + "), k_B)>",
        env);
    CHECK(print_terms(drop_last(g.goal.left)) == print_terms(expected.left));
    CHECK(print_terms(drop_last(g.goal.right)) == print_terms(expected.right));
    CHECK(g.goal.left.back() == T(env, "g_guess(" + phi(4) + ")"));
    CHECK(g.left_frames.size() == 5);
    CHECK(g.left_frames[2].size() == 2);
}

TEST_CASE("stateless keyed protocol, two full sessions") {
    const auto& s = spec("lakp");
    auto g = gen_fixed_trace_goal(
        s, parse_trace("ReaderInit, TagMsg_A, ReaderMsg, ReaderInit, TagMsg_A, ReaderMsg", 3));
    const Env& env = g.env;
    auto pre = [](const TermList& ts, int k) { return print_terms(TermList(ts.begin(), ts.begin() + k)); };
    auto s_term = [](const std::string& nt, const std::string& phi, const std::string& k) {
        return "<" + nt + ", hash(combine(g(" + phi + "), " + nt + "), " + k + ")>";
    };
    auto t_term = [](const std::string& nr, const std::string& phi, const std::string& k) {
        std::string gp = "g(" + phi + ")";
        return "ite(EQ(hash(combine(" + nr + ", pi1(" + gp + ")), " + k + "), pi2(" + gp + ")), hash(combine(pi2(" +
               gp + "), " + nr + "), " + k + "), 0)";
    };
    const TermList& L = g.goal.left;
    const TermList& R = g.goal.right;
    std::string left = "n_R, " + s_term("n_T", "n_R", "k_A") + ", " + t_term("n_R", pre(L, 2), "k_A") + ", n_R', " +
                       s_term("n_T'", pre(L, 4), "k_A") + ", " + t_term("n_R'", pre(L, 5), "k_A");
    std::string right = "n_R, " + s_term("n_T", "n_R", "k_A") + ", " + t_term("n_R", pre(L, 2), "k_A") + ", n_R', " +
                        s_term("n_T'", pre(L, 4), "k_B") + ", " + t_term("n_R'", pre(R, 5), "k_B");
    Goal expected = parse_goal(left + " ~ " + right, env);
    CHECK(print_terms(drop_last(L)) == print_terms(expected.left));
    CHECK(print_terms(drop_last(R)) == print_terms(expected.right));
    // the first five right-hand elements share their frames with the left
    for (int i = 0; i < 4; ++i) CHECK(L[i] == R[i]);
    CHECK(L[5] != R[5]);
}

TEST_CASE("generation is deterministic") {
    const auto& s = spec("kcl");
    auto t = parse_trace("SetKey_B, ReaderInit, TagMsg_A, ReaderInit", 2);
    auto a = gen_fixed_trace_goal(s, t);
    auto b = gen_fixed_trace_goal(s, t);
    CHECK(a.goal == b.goal);
    CHECK(write_goal_file(a.env.sig(), "g", a.goal, a.comments) ==
          write_goal_file(b.env.sig(), "g", b.goal, b.comments));
}

TEST_CASE("folded goals collapse to the fixed trace") {
    const auto& s = spec("kcl");
    std::mt19937 rng(7);
    auto first = s.gamma(), second = s.gamma(true);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t m = rng() % 4 + 1, p = rng() % (m + 1);
        TraceSpec t;
        t.p = p;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& pool = i < p ? first : second;
            t.actions.push_back(pool[rng() % pool.size()]);
        }
        CAPTURE(trial);
        CHECK(fold_matches_trace(s, t));
    }
}
