#include "doctest.h"

#include "bcsa/normalize.hpp"
#include "bcsa/syntax.hpp"

#include <random>

using namespace bcsa;

namespace {

const Env& env() {
    static Env e = [] {
        Env env;
        for (const char* n : {"n", "m", "n1", "n2", "n3", "n4", "a", "b", "k", "u", "v", "u2", "v2", "x", "y", "z", "n_R2", "w"})
            env.sig_mut().declare_name(n);
        env.sig_mut().declare_adversarial("g");
        env.sig_mut().declare_label("L1");
        env.sig_mut().declare_label("L2");
        return env;
    }();
    return e;
}

Term P(const std::string& s) { return parse_term(s, env()); }
Term N(const std::string& s) { return nf(P(s)); }

}  // namespace

TEST_CASE("conditional rules") {
    CHECK(N("ite(true, n, m)") == P("n"));
    CHECK(N("ite(false, n, m)") == P("m"));
    CHECK(N("ite(EQ(a, b), n, n)") == P("n"));
    CHECK(N("EQ(<a, b>, <a, b>)") == P("true"));
    CHECK(N("ite(EQ(a, b), ite(EQ(a, b), n, m), x)") == P("ite(EQ(a, b), n, x)"));
    CHECK(N("ite(EQ(a, b), x, ite(EQ(a, b), n, m))") == P("ite(EQ(a, b), x, m)"));
}

TEST_CASE("projections") {
    CHECK(N("pi1(<a, b>)") == P("a"));
    CHECK(N("pi2(<a, <b, n>>)") == P("<b, n>"));
    CHECK(N("pi1(g(a))") == P("pi1(g(a))"));
}

TEST_CASE("xor canonical form") {
    CHECK(N("n1 (+) (n2 (+) n1)") == P("n2"));
    CHECK(N("n (+) n") == P("0"));
    CHECK(N("0 (+) n") == P("n"));
    CHECK(N("(n2 (+) n1) (+) n3") == P("n1 (+) n2 (+) n3"));
    CHECK(nf(P("a (+) b")) == nf(P("b (+) a")));
}

TEST_CASE("xor oracle over four names") {
    // brute force: the normal form of any xor tree is determined by the parity of each name
    const char* names[] = {"n1", "n2", "n3", "n4"};
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 400; ++iter) {
        std::function<Term(int)> gen = [&](int depth) -> Term {
            if (depth == 0 || rng() % 3 == 0) {
                int r = static_cast<int>(rng() % 5);
                return r == 4 ? t_zero() : Term::name(names[r]);
            }
            return t_xor(gen(depth - 1), gen(depth - 1));
        };
        Term t = gen(4);
        int parity[4] = {0, 0, 0, 0};
        std::function<void(const Term&)> count = [&](const Term& u) {
            if (u.is_app("xor")) {
                count(u.arg(0));
                count(u.arg(1));
            } else if (u.is_name()) {
                for (int i = 0; i < 4; ++i)
                    if (u.id() == names[i]) parity[i] ^= 1;
            }
        };
        count(t);
        Term expect;
        for (int i = 3; i >= 0; --i) {
            if (!parity[i]) continue;
            Term nm = Term::name(names[i]);
            expect = expect.valid() ? t_xor(nm, expect) : nm;
        }
        if (!expect.valid()) expect = t_zero();
        CHECK(nf(t) == expect);
    }
}

TEST_CASE("injectivity of combine") {
    CHECK(N("ite(EQ(u, u2), false, EQ(combine(u, v), combine(u2, v2)))") == P("false"));
    CHECK(N("ite(EQ(v, v2), false, EQ(combine(u, v), combine(u2, v2)))") == P("false"));
    // both orientations of the condition order collapse
    CHECK(N("ite(EQ(x, y), false, EQ(combine(a, x), combine(b, y)))") == P("false"));
    CHECK(N("ite(EQ(a, b), false, EQ(combine(a, x), combine(b, y)))") == P("false"));
    CHECK(N("EQ(combine(u, v), combine(u2, v2))") == nf(P("ite(EQ(u, u2), ite(EQ(v, v2), true, false), false)")));
    CHECK(N("EQ(combine(u, v), combine(u, v))") == P("true"));
}

TEST_CASE("ite commutation orders conditions") {
    Term t1 = P("ite(EQ(b, x), ite(EQ(a, x), n, m), w)");
    Term t2 = P("ite(EQ(a, x), ite(EQ(b, x), n, w), ite(EQ(b, x), m, w))");
    CHECK(nf(t1) == nf(t2));
    CHECK(nf(t1) == t2);
}

TEST_CASE("labels are distinct constants") {
    CHECK(N("EQ(L1, L2)") == P("false"));
    CHECK(N("EQ(L1, L1)") == P("true"));
    CHECK(N("EQ(g(a), L1)") == P("EQ(g(a), L1)"));
}

TEST_CASE("eq_modulo") {
    CHECK(eq_modulo(P("a (+) b"), P("b (+) a")));
    CHECK(eq_modulo(P("pi1(<a, b>)"), P("a")));
    CHECK_FALSE(eq_modulo(P("hash(a, k)"), P("hash(b, k)")));
    CHECK_THROWS_AS(eq_modulo(P("a"), P("true")), Error);
    CHECK(eq_modulo(P("ite(EQ(n_R2, g(a)), x, y)"), P("y")));
    CHECK_FALSE(same_modulo(P("a"), P("true")));
}

TEST_CASE("lazy EqIndep is logged") {
    NormalizeOptions o;
    o.trace = true;
    o.eq_indep = true;
    auto r = normalize(P("EQ(n_R2, g(a))"), o);
    CHECK(r.term == P("false"));
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].rule == "EqIndep");
    CHECK(nf(P("EQ(n_R2, g(a))")) == P("EQ(n_R2, g(a))"));
    CHECK(nf(P("EQ(n, n (+) m)"), true) == P("EQ(n, m (+) n)"));
}

TEST_CASE("lift_if") {
    CHECK(lift_if(P("<ite(EQ(a, b), x, y), w>"), {0}) == P("ite(EQ(a, b), <x, w>, <y, w>)"));
    CHECK(lift_if(P("hash(ite(EQ(a, b), x, y), k)"), {0}) == P("ite(EQ(a, b), hash(x, k), hash(y, k))"));
    CHECK_THROWS_AS(lift_if(P("n"), {}), Error);
    CHECK_THROWS_AS(lift_if(P("<a, b>"), {0}), Error);
    // lifting preserves the meaning modulo normalization in nested positions
    Term t = P("<a, hash(ite(EQ(a, b), x, y), k)>");
    CHECK(lift_if(t, {1, 0}) == P("<a, ite(EQ(a, b), hash(x, k), hash(y, k))>"));
}

TEST_CASE("derive_false_equality") {
    CHECK(derive_false_equality(P("EQ(n_R2, g(a))")));
    CHECK_FALSE(derive_false_equality(P("EQ(n, n (+) m)")));
    CHECK(derive_false_equality(P("EQ(n, m)")));
    CHECK_THROWS_AS(derive_false_equality(P("EQ(g(a), <a, b>)")), Error);
}

TEST_CASE("normalize is idempotent and a congruence on samples") {
    std::vector<std::string> samples = {
        "ite(EQ(a, b), ite(EQ(a, x), n (+) m, m (+) n), n)", "<pi1(<a, b>), ite(true, n1 (+) n1, n2)>",
        "ite(EQ(x, y), ite(EQ(a, b), n, m), ite(EQ(a, b), m, n))",
        "EQ(combine(a, ite(EQ(a, b), x, y)), combine(a, y))"};
    for (const auto& s : samples) {
        CAPTURE(s);
        Term t = P(s);
        CHECK(nf(nf(t)) == nf(t));
        Term ctx = t_pair(P("w"), t.sort() == Sort::Bool ? t_ite(t, P("a"), P("b")) : t);
        Term ctx2 = t_pair(P("w"), t.sort() == Sort::Bool ? t_ite(nf(t), P("a"), P("b")) : nf(t));
        CHECK(eq_modulo(ctx, ctx2));
    }
}

TEST_CASE("trace records each root rewrite") {
    NormalizeOptions o;
    o.trace = true;
    auto r = normalize(P("ite(true, pi1(<a, b>), n)"), o);
    CHECK(r.term == P("a"));
    CHECK(r.trace.size() == 2);
}
