#include "doctest.h"

#include "bcsa/proof.hpp"

using namespace bcsa;

namespace {

Env make_env() {
    Env env;
    for (const char* n : {"n", "m", "a", "b", "k", "m0", "m1", "m2", "m3", "m4", "seed", "r1"})
        env.sig_mut().declare_name(n);
    env.sig_mut().declare_adversarial("g");
    return env;
}

const Env& env() {
    static Env e = make_env();
    return e;
}

Goal G(const std::string& s) { return parse_goal(s, env()); }

Verdict check(const std::string& script, const std::string& goal) {
    return check_proof(parse_script(script), G(goal), env());
}

Context ctx(const std::string& s) { return Context::make(parse_term(s, env())); }

}  // namespace

TEST_CASE("single leaf script") {
    auto s = parse_script("(refl)");
    CHECK(s.node_count() == 1);
    auto v = check("(refl)", "n ~ n");
    CHECK(v.accepted);
    CHECK(v.steps_checked == 1);
    CHECK_FALSE(v.failure.has_value());
}

TEST_CASE("parse errors carry a location") {
    try {
        parse_script("(fa pos=1\n  (refl)");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_script("(frobnicate)"), Error);
    CHECK_THROWS_AS(parse_script("(refl) (refl)"), Error);
    CHECK_THROWS_AS(parse_script("; only a comment"), Error);
    CHECK_THROWS_AS(parse_script("(fa pos=[1 2)"), Error);
    CHECK_THROWS_AS(parse_script("(use nothing)"), Error);
}

TEST_CASE("tree checking and failure paths") {
    const char* script = R"s(
        ; drop the fresh nonce, then split the pair
        (freshnonce pos=2
          (fa pos=1
            (refl)))
    )s";
    auto v = check(script, "<a, b>, n ~ <a, b>, n");
    CHECK(v.accepted);
    CHECK(v.steps_checked == 3);

    v = check(script, "<a, b>, n ~ <a, m>, n");
    CHECK_FALSE(v.accepted);
    REQUIRE(v.failure.has_value());
    CHECK(v.failure->path_string() == "root.0.0");
    CHECK(v.failure->step == 2);
    CHECK(v.steps_checked == 2);

    v = check(script, "<a, n>, n ~ <a, n>, n");
    REQUIRE(v.failure.has_value());
    CHECK(v.failure->path_string() == "root");
    CHECK(v.failure->report.code == ErrorCode::SideConditionViolation);
}

TEST_CASE("child count must match the premises") {
    auto v = check("(fa pos=1)", "<a, b> ~ <a, b>");
    REQUIRE(v.failure.has_value());
    CHECK(v.failure->report.code == ErrorCode::ShapeMismatch);
    v = check("(refl (refl))", "a ~ a");
    CHECK_FALSE(v.accepted);
}

TEST_CASE("lets, expectations and reusable subproofs") {
    const char* script = R"s(
        (let w "g(a)")
        (defproof close (refl))
        (trans via="w"
          (use close)
          (refl expect="w ~ g(a)"))
    )s";
    CHECK(check(script, "g(a) ~ g(a)").accepted);
    auto v = check(R"s((trans via="g(b)" (refl) (refl)))s", "g(a) ~ g(a)");
    REQUIRE(v.failure.has_value());
    CHECK(v.failure->path_string() == "root.0");
    v = check(R"s((refl expect="a ~ b"))s", "a ~ a");
    CHECK_FALSE(v.accepted);
}

TEST_CASE("printing a script parses back to the same tree") {
    const char* script = R"s((goal main)
        (cs pos=[1 2] z="0"
          (fa pos=1 star=1 (refl))
          (trans via=["a" "b"] (refl) (sym (refl)) (refl expect="b ~ b"))))s";
    auto s = parse_script(script);
    auto again = parse_script(print_script(s));
    CHECK(print_script(again) == print_script(s));
    CHECK(again.goal_name == std::optional<std::string>("main"));
    CHECK(again.node_count() == 8);
}

TEST_CASE("checking is deterministic") {
    const char* script = "(freshnonce pos=2 (fa pos=1 (refl)))";
    auto v1 = check(script, "<a, m>, n ~ <a, b>, n");
    auto v2 = check(script, "<a, m>, n ~ <a, b>, n");
    CHECK(v1.describe() == v2.describe());
}

TEST_CASE("generator separation over several context families") {
    std::vector<Context> hashed, paired, shared;
    for (int i = 0; i < 5; ++i) {
        hashed.push_back(ctx("hash(?HOLE:Msg, k)"));
        paired.push_back(ctx("<?HOLE:Msg, m" + std::to_string(i) + ">"));
        shared.push_back(ctx("g(<?HOLE:Msg, m>, 0)"));
    }
    for (std::size_t n : {0u, 1u, 2u, 4u}) {
        CHECK(check_prng_separation(n, hashed).accepted);
        CHECK(check_prng_separation(n, paired).accepted);
        CHECK(check_prng_separation(n, shared).accepted);
    }
    auto sep = build_prng_separation(std::vector<Context>(3, ctx("<?HOLE:Msg, m>")));
    CHECK(print_script(sep.script).find("(Dup") != std::string::npos);
}

TEST_CASE("generator separation rejects reserved names") {
    try {
        check_prng_separation(0, {ctx("<?HOLE:Msg, seed>")});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ContextContainsReservedName);
    }
    CHECK_THROWS_AS(check_prng_separation(1, {ctx("<?HOLE:Msg, r1>"), ctx("?HOLE:Msg")}), Error);
    CHECK_THROWS_AS(check_prng_separation(2, {ctx("?HOLE:Msg")}), Error);
}

TEST_CASE("context files") {
    auto cf = parse_context_file(R"s(names k m
context u0 : hash(?HOLE:Msg, k)
context u1 : <m, ?HOLE:Msg>
)s");
    REQUIRE(cf.contexts.size() == 2);
    CHECK(cf.contexts[1].first == "u1");
    CHECK_THROWS_AS(parse_context_file("names k\ncontext u : k\n"), Error);
}
