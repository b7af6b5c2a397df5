#include "doctest.h"

#include "bcsa/goal.hpp"
#include "bcsa/normalize.hpp"
#include "bcsa/rules.hpp"

#include <algorithm>
#include <random>

using namespace bcsa;

namespace {

const Env& env() {
    static Env e = [] {
        Env env;
        for (const char* n : {"n", "m", "n_R", "n_T", "k", "k_A", "k_B", "a", "b", "c", "s", "n0", "n1", "n2", "x1"})
            env.sig_mut().declare_name(n);
        env.sig_mut().declare_adversarial("g");
        env.sig_mut().declare_adversarial("f");
        return env;
    }();
    return e;
}

Goal G(const std::string& s) { return parse_goal(s, env()); }
Value I(long long v) { return Value::integer(v); }
Value S(const std::string& s) { return Value::str(s); }
Value Id(const std::string& s) { return Value::ident(s); }
Value L(std::vector<Value> v) { return Value::list(std::move(v)); }

RuleInstance R(RuleKind k) {
    RuleInstance r;
    r.kind = k;
    return r;
}

std::vector<Goal> apply(const RuleInstance& r, const Goal& g) { return apply_rule(r, g, env()); }

ErrorCode code_of(const RuleInstance& r, const Goal& g) {
    auto rep = check_side_conditions(r, g, env());
    REQUIRE_FALSE(rep.passed);
    return rep.code;
}

void well_formed(const std::vector<Goal>& gs) {
    for (const auto& g : gs) CHECK_NOTHROW(g.validate());
}

}  // namespace

TEST_CASE("every rule kind has a distinct name that parses back") {
    for (RuleKind k : all_rule_kinds()) {
        auto back = parse_rule_kind(rule_name(k));
        REQUIRE(back.has_value());
        CHECK(*back == k);
    }
    CHECK(parse_rule_kind("freshnonce") == RuleKind::FreshNonce);
    CHECK(parse_rule_kind("PRF") == RuleKind::PRF);
    CHECK_FALSE(parse_rule_kind("Magic").has_value());
    CHECK(all_rule_kinds().size() == 19);
}

TEST_CASE("Refl and Sym") {
    CHECK(apply(R(RuleKind::Refl), G("g(n), <n, m> ~ g(n), <n, m>")).empty());
    CHECK(apply(R(RuleKind::Refl), G("pi1(<n, m>) ~ n")).empty());
    CHECK(code_of(R(RuleKind::Refl), G("n ~ m")) == ErrorCode::ShapeMismatch);
    auto s = apply(R(RuleKind::Sym), G("n, a ~ m, b"));
    REQUIRE(s.size() == 1);
    CHECK(s[0] == G("m, b ~ n, a"));
}

TEST_CASE("Trans with one or several witnesses") {
    auto r = R(RuleKind::Trans);
    r.set("via", S("g(a)"));
    auto out = apply(r, G("g(n) ~ g(m)"));
    REQUIRE(out.size() == 2);
    CHECK(out[0] == G("g(n) ~ g(a)"));
    CHECK(out[1] == G("g(a) ~ g(m)"));
    r.set("via", L({S("a"), S("b")}));
    CHECK(apply(r, G("n ~ m")).size() == 3);
    r.set("via", S("a, b"));
    CHECK(code_of(r, G("n ~ m")) == ErrorCode::ShapeMismatch);
    r.set("via", S("@R1"));
    out = apply(r, G("n ~ m"));
    CHECK(out[0] == G("n ~ m"));
}

TEST_CASE("FreshNonce drops a fresh name on both sides") {
    auto r = R(RuleKind::FreshNonce);
    r.set("pos", I(2));
    auto out = apply(r, G("g(a), n_R ~ g(b), n_R"));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == G("g(a) ~ g(b)"));
    CHECK(code_of(r, G("g(n_R), n_R ~ g(b), n_R")) == ErrorCode::SideConditionViolation);
    CHECK(code_of(r, G("g(a), g(n_R) ~ g(b), n_R")) == ErrorCode::ShapeMismatch);
    r.set("pos", I(3));
    CHECK(code_of(r, G("a, n ~ a, n")) == ErrorCode::InvalidPosition);
}

TEST_CASE("FreshNonce reports the offending occurrence") {
    auto r = R(RuleKind::FreshNonce);
    r.set("pos", I(1));
    auto rep = check_side_conditions(r, G("n, <a, n> ~ n, a"), env());
    REQUIRE_FALSE(rep.passed);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].offending == "<a, n>");
}

TEST_CASE("Dup needs an identical twin") {
    auto r = R(RuleKind::Dup);
    r.set("pos", I(3));
    auto out = apply(r, G("a, b, a ~ n, m, n"));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == G("a, b ~ n, m"));
    CHECK(code_of(r, G("a, b, a ~ n, m, m")) == ErrorCode::SideConditionViolation);
}

TEST_CASE("Perm reorders both sides") {
    auto r = R(RuleKind::Perm);
    r.set("order", L({I(2), I(1)}));
    CHECK(apply(r, G("a, b ~ n, m"))[0] == G("b, a ~ m, n"));
    r.set("order", L({I(1), I(1)}));
    CHECK(code_of(r, G("a, b ~ n, m")) == ErrorCode::ShapeMismatch);
}

TEST_CASE("FA one layer and starred") {
    auto r = R(RuleKind::FA);
    r.set("pos", I(2));
    auto out = apply(r, G("a, <g(n), hash(b, k)> ~ a, <g(m), hash(c, k)>"));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == G("a, g(n), hash(b, k) ~ a, g(m), hash(c, k)"));
    r.set("star", I(1));
    out = apply(r, G("a, <g(n), hash(b, k)> ~ a, <g(m), hash(c, k)>"));
    CHECK(out[0] == G("a, n, hash(b, k) ~ a, m, hash(c, k)"));
    // pairs already in the frame are dropped
    out = apply(r, G("n, <n, m> ~ a, <a, b>"));
    CHECK(out[0] == G("n, m ~ a, b"));
    CHECK(code_of(r, G("a, <n, m> ~ a, g(n)")) == ErrorCode::ShapeMismatch);
    well_formed(out);
}

TEST_CASE("Indep removes a masked element") {
    auto r = R(RuleKind::Indep);
    r.set("pos", I(2)).set("name", Id("n"));
    auto out = apply(r, G("g(a), a (+) n ~ g(b), b (+) n"));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == G("g(a) ~ g(b)"));
    CHECK(check_side_conditions(r, G("g(a), n (+) a ~ g(b), b (+) n"), env()).passed);
    CHECK(code_of(r, G("g(n), a (+) n ~ g(b), b (+) n")) == ErrorCode::SideConditionViolation);
    CHECK(code_of(r, G("g(a), a (+) m ~ g(b), b (+) n")) == ErrorCode::ShapeMismatch);
    r.set("name'", Id("m"));
    CHECK(check_side_conditions(r, G("g(a), a (+) n ~ g(b), b (+) m"), env()).passed);
}

TEST_CASE("EqIndep and injectivity rewrite to false") {
    auto r = R(RuleKind::EqIndep);
    r.set("pos", I(1)).set("at", L({I(0)}));
    auto out = apply(r, G("ite(EQ(n, g(a)), a, b) ~ b"));
    CHECK(out[0] == G("ite(false, a, b) ~ b"));
    CHECK(code_of(r, G("ite(EQ(n, g(n)), a, b) ~ b")) == ErrorCode::SideConditionViolation);
    CHECK(code_of(r, G("ite(EQ(g(a), g(b)), a, b) ~ b")) == ErrorCode::ShapeMismatch);

    auto inj = R(RuleKind::CombineInjL);
    inj.set("pos", I(1)).set("side", Id("right"));
    Goal g = G("false ~ ite(EQ(a, b), false, EQ(combine(a, n), combine(b, m)))");
    CHECK(apply(inj, g)[0] == G("false ~ false"));
    auto injr = R(RuleKind::CombineInjR);
    injr.set("pos", I(1)).set("side", Id("right"));
    CHECK(code_of(injr, g) == ErrorCode::SideConditionViolation);
}

TEST_CASE("Congr by term and by lifting") {
    auto r = R(RuleKind::Congr);
    r.set("pos", I(1)).set("left", S("n"));
    CHECK(apply(r, G("pi1(<n, m>) ~ a"))[0] == G("n ~ a"));
    r.set("left", S("m"));
    CHECK(code_of(r, G("pi1(<n, m>) ~ a")) == ErrorCode::SideConditionViolation);

    auto lift = R(RuleKind::Congr);
    lift.set("pos", I(1)).set("lift", L({I(0)}));
    auto out = apply(lift, G("<ite(EQ(a, b), n, m), c> ~ a"));
    CHECK(out[0] == G("ite(EQ(a, b), <n, c>, <m, c>) ~ a"));
    lift.set("lift", L({}));
    CHECK(code_of(lift, G("n ~ a")) == ErrorCode::InvalidPosition);
}

TEST_CASE("IfThen replaces either side of the tested equality") {
    auto r = R(RuleKind::IfThen);
    r.set("pos", I(1)).set("hole", L({I(0)}));
    auto out = apply(r, G("ite(EQ(a, b), g(a), c) ~ n"));
    CHECK(out[0] == G("ite(EQ(a, b), g(b), c) ~ n"));
    out = apply(r, G("ite(EQ(a, b), g(b), c) ~ n"));
    CHECK(out[0] == G("ite(EQ(a, b), g(a), c) ~ n"));
    CHECK(code_of(r, G("ite(EQ(a, b), g(c), c) ~ n")) == ErrorCode::SideConditionViolation);
}

TEST_CASE("CS emits the two branch premises") {
    auto r = R(RuleKind::CS);
    r.set("pos", I(2));
    auto out = apply(r, G("a, ite(EQ(a, b), n, m) ~ a, ite(EQ(a, c), m, n)"));
    REQUIRE(out.size() == 2);
    CHECK(out[0] == G("a, EQ(a, b), ite(EQ(a, b), n, 0) ~ a, EQ(a, c), ite(EQ(a, c), m, 0)"));
    CHECK(out[1] == G("a, EQ(a, b), ite(EQ(a, b), 0, m) ~ a, EQ(a, c), ite(EQ(a, c), 0, n)"));
    well_formed(out);
    r.set("pos", L({I(1), I(2)}));
    CHECK(code_of(r, G("ite(EQ(a, b), n, m), ite(EQ(a, c), n, m) ~ n, n")) == ErrorCode::ShapeMismatch);
}

TEST_CASE("CR checks the key position") {
    auto r = R(RuleKind::CR);
    r.set("pos", I(2)).set("key", Id("k"));
    Goal ok = G("hash(a, k), ite(EQ(a, b), false, EQ(hash(a, k), hash(b, k))) ~ hash(a, k), false");
    CHECK(apply(r, ok).empty());
    Goal bad = G("<k, a>, ite(EQ(a, b), false, EQ(hash(a, k), hash(b, k))) ~ <k, a>, false");
    auto rep = check_side_conditions(r, bad, env());
    CHECK_FALSE(rep.passed);
    CHECK(rep.code == ErrorCode::SideConditionViolation);
    Goal wrongkey = G("a, ite(EQ(a, b), false, EQ(hash(a, k), hash(b, k_A))) ~ a, false");
    CHECK(code_of(r, wrongkey) == ErrorCode::ShapeMismatch);
}

TEST_CASE("PRF with an empty and a non-empty guard") {
    auto r = R(RuleKind::PRF);
    r.set("pos", I(2)).set("key", Id("k_A")).set("fresh", Id("n"));
    CHECK(apply(r, G("g(a), hash(n_T, k_A) ~ g(a), n")).empty());
    CHECK(apply(r, G("g(a), n ~ g(a), hash(n_T, k_A)")).empty());

    Goal g2 = G("hash(a, k_A), hash(b, k_A), ite(EQ(a, n_T), 0, ite(EQ(b, n_T), 0, hash(n_T, k_A))) ~ "
                "hash(a, k_A), hash(b, k_A), ite(EQ(a, n_T), 0, ite(EQ(b, n_T), 0, n))");
    r.set("pos", I(3));
    CHECK(apply(r, g2).empty());

    SUBCASE("missing test") {
        Goal g = G("hash(a, k_A), hash(b, k_A), ite(EQ(a, n_T), 0, hash(n_T, k_A)) ~ "
                   "hash(a, k_A), hash(b, k_A), ite(EQ(a, n_T), 0, n)");
        CHECK(code_of(r, g) == ErrorCode::SideConditionViolation);
    }
    SUBCASE("fresh name reused") {
        Goal g = G("g(n), hash(n_T, k_A) ~ g(n), n");
        r.set("pos", I(2));
        auto rep = check_side_conditions(r, g, env());
        REQUIRE_FALSE(rep.passed);
        CHECK(rep.violations[0].offending == "g(n)");
    }
    SUBCASE("key cycle") {
        Goal g = G("g(k_A), hash(n_T, k_A) ~ g(k_A), n");
        r.set("pos", I(2));
        CHECK(code_of(r, g) == ErrorCode::SideConditionViolation);
    }
    SUBCASE("contexts differ") {
        Goal g = G("g(a), hash(n_T, k_A) ~ g(b), n");
        r.set("pos", I(2));
        CHECK(code_of(r, g) == ErrorCode::ShapeMismatch);
    }
}

TEST_CASE("PRF verdict does not depend on disjunct order") {
    std::vector<std::string> hs = {"a", "b", "c", "m"};
    std::string ctx = "hash(a, k), hash(b, k), hash(c, k), hash(m, k)";
    std::mt19937 rng(7);
    auto r = R(RuleKind::PRF);
    r.set("pos", I(5)).set("key", Id("k")).set("fresh", Id("n"));
    for (int trial = 0; trial < 24; ++trial) {
        auto order = hs;
        std::shuffle(order.begin(), order.end(), rng);
        bool nested = trial % 2;
        std::string c = "or(";
        for (std::size_t i = 0; i < order.size(); ++i) {
            bool flip = (rng() & 1) != 0;
            c += (i ? ", " : "") + (flip ? "EQ(n_T, " + order[i] + ")" : "EQ(" + order[i] + ", n_T)");
        }
        c += ")";
        std::string lhs, rhs;
        if (nested) {
            lhs = "hash(n_T, k)";
            rhs = "n";
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                lhs = "ite(EQ(" + *it + ", n_T), 0, " + lhs + ")";
                rhs = "ite(EQ(" + *it + ", n_T), 0, " + rhs + ")";
            }
        } else {
            lhs = "ite(" + c + ", 0, hash(n_T, k))";
            rhs = "ite(" + c + ", 0, n)";
        }
        Goal g = G(ctx + ", " + lhs + " ~ " + ctx + ", " + rhs);
        CHECK(check_side_conditions(r, g, env()).passed);
        // dropping one disjunct is always rejected
        std::string c2 = "or(";
        for (std::size_t i = 0; i + 1 < order.size(); ++i) c2 += (i ? ", EQ(" : "EQ(") + order[i] + ", n_T)";
        c2 += ")";
        Goal bad = G(ctx + ", ite(" + c2 + ", 0, hash(n_T, k)) ~ " + ctx + ", ite(" + c2 + ", 0, n)");
        CHECK_FALSE(check_side_conditions(r, bad, env()).passed);
    }
}

TEST_CASE("PRNG chains and forward secrecy") {
    Goal g = G("pi_o(G(init(s))), pi_o(G(pi_S(G(init(s))))) ~ n0, n1");
    CHECK(apply(R(RuleKind::PRNG), g).empty());
    Goal dup = G("pi_o(G(init(s))), pi_o(G(pi_S(G(init(s))))) ~ n0, n0");
    CHECK(code_of(R(RuleKind::PRNG), dup) == ErrorCode::SideConditionViolation);
    Goal broken = G("pi_o(G(init(s))), pi_o(G(init(s))) ~ n0, n1");
    CHECK(code_of(R(RuleKind::PRNG), broken) == ErrorCode::ShapeMismatch);
    Goal fs = G("pi_o(G(init(s))), pi_S(G(init(s))) ~ n0, pi_S(G(init(s)))");
    CHECK(apply(R(RuleKind::PRNG_FS), fs).empty());
}

TEST_CASE("Absurd reduces to true ~ false") {
    auto out = apply(R(RuleKind::Absurd), G("n ~ m"));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == G("true ~ false"));
}

TEST_CASE("unknown or missing parameters are shape errors") {
    auto r = R(RuleKind::FreshNonce);
    CHECK(code_of(r, G("n ~ n")) == ErrorCode::ShapeMismatch);
    r.set("pos", I(1)).set("color", Id("red"));
    CHECK(code_of(r, G("n ~ n")) == ErrorCode::ShapeMismatch);
}

TEST_CASE("pretty rendering") {
    auto t = R(RuleKind::Trans);
    t.set("via", S("witness"));
    CHECK(pretty_rule(t) == "Trans via ⟨witness⟩");
    auto fa = R(RuleKind::FA);
    fa.set("pos", I(2));
    Goal g = G("a, <n, m> ~ a, <n, m>");
    CHECK(pretty_rule(fa, &g) == "FA(pair @2)");
    auto prf = R(RuleKind::PRF);
    prf.set("pos", I(2)).set("key", Id("k_A")).set("fresh", Id("n"));
    CHECK(pretty_rule(prf) == "PRF_n(k_A, fresh n)");
}

TEST_CASE("emitted subgoals stay well formed under random positions") {
    Goal g = G("<a, n>, ite(EQ(a, b), g(a), g(b)), hash(a, k), <m, b> ~ <b, n>, ite(EQ(a, c), g(c), g(a)), hash(b, k), <m, a>");
    std::mt19937 rng(3);
    const RuleKind kinds[] = {RuleKind::FA, RuleKind::Dup, RuleKind::FreshNonce, RuleKind::CS, RuleKind::Sym};
    for (int i = 0; i < 200; ++i) {
        auto r = R(kinds[rng() % 5]);
        if (r.kind != RuleKind::Sym) r.set("pos", I(static_cast<long long>(rng() % 5)));
        if (rng() % 2 && r.kind == RuleKind::FA) r.set("star", I(1));
        auto rep = check_side_conditions(r, g, env());
        if (rep.passed) {
            well_formed(apply(r, g));
        } else {
            CHECK_THROWS_AS(apply(r, g), Error);
        }
    }
}
