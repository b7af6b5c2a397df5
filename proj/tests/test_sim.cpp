#include "doctest.h"

#include "bcsa/normalize.hpp"
#include "bcsa/sim.hpp"

using namespace bcsa;

namespace {

std::string data(const std::string& rel) { return std::string(BCSA_DATA_DIR) + "/" + rel; }

const ProtocolSpec& spec(const std::string& name) {
    static std::map<std::string, ProtocolSpec> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, load_spec(data("specs/" + name + ".bcspec"))).first;
    return it->second;
}

Env names_env() {
    Env env;
    for (const char* n : {"n", "m", "k", "a"}) env.sig_mut().declare_name(n);
    return env;
}

PrimitiveSuite suite(HashImpl h = HashImpl::PRF, CombineImpl c = CombineImpl::Xor) {
    PrimitiveSuite s;
    s.hash = h;
    s.combine = c;
    return s;
}

}  // namespace

TEST_CASE("evaluation of the built-in operators") {
    Env env = names_env();
    std::mt19937_64 rng(1);
    std::map<std::string, Bits> names{{"n", random_bits(rng, 64)}, {"m", random_bits(rng, 64)}};
    auto ev = [&](const std::string& s) { return eval_term(parse_term(s, env), suite(), names, {}); };
    CHECK(ev("n (+) n") == zeros(64));
    CHECK(ev("pi1(<n, m>)") == names["n"]);
    CHECK(ev("pi2(<n, m>)") == names["m"]);
    CHECK(ev("ite(EQ(n, n), n, m)") == names["n"]);
    CHECK(ev("ite(EQ(n, m), n, m)") == names["m"]);
    CHECK(ev("EQ(n, m)") == Bits{0});
    CHECK_THROWS_AS(ev("k"), Error);
}

TEST_CASE("unbound symbols") {
    Env env = names_env();
    env.sig_mut().declare_adversarial("f");
    try {
        eval_term(parse_term("f(n)", env), suite(), {{"n", zeros(64)}}, {});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundSymbol);
    }
    try {
        eval_term(parse_term("n", env), suite(), {}, {});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundName);
    }
}

TEST_CASE("pair codec") {
    std::mt19937_64 rng(3);
    Bits a = random_bits(rng, 64), b = random_bits(rng, 20);
    CHECK(project(encode_pair(a, b), 1) == a);
    CHECK(project(encode_pair(a, b), 2) == b);
    CHECK(project(Bits{1, 0}, 1).empty());
}

TEST_CASE("hash suites") {
    Evaluator prf(suite(), 5), leaky(suite(HashImpl::Leaky), 5), cr(suite(HashImpl::CROnly), 5);
    std::mt19937_64 rng(9);
    Bits k = random_bits(rng, 64), m = random_bits(rng, 64);
    CHECK(prf.hash(m, k) == prf.hash(m, k));
    CHECK(prf.hash(m, k).size() == 64);
    Bits l = leaky.hash(m, k);
    CHECK(l.size() == 64);
    CHECK(l[0] == k[0]);
    CHECK(cr.hash(m, k)[0] == m[0]);
}

TEST_CASE("generator steps") {
    std::mt19937_64 rng(11);
    Bits seed = random_bits(rng, 64);
    Cprng a(64, seed), b(64, seed);
    CHECK(a.next() == b.next());
    CHECK(a.next() == b.next());

    Cprng c(64, seed);
    std::size_t ones = 0;
    for (int i = 0; i < 1000; ++i)
        for (auto x : c.next()) ones += x;
    CHECK(std::abs(static_cast<double>(ones) / 64000.0 - 0.5) < 0.02);

    std::set<Bits> firsts;
    for (int i = 0; i < 400; ++i) firsts.insert(Cprng(64, random_bits(rng, 64)).next());
    CHECK(firsts.size() == 400);
}

TEST_CASE("concrete protocol runs") {
    auto t = run_protocol_trace(spec("kclp"), parse_trace("ReaderInit, TagMsg_A", 2), suite(), 4);
    REQUIRE(t.messages.size() == 2);
    CHECK(t.messages[0].size() == 64);
    auto again = run_protocol_trace(spec("kclp"), parse_trace("ReaderInit, TagMsg_A", 2), suite(), 4);
    CHECK(again.messages == t.messages);

    // an honest session: the reader's guard holds and it answers with a hash
    auto s = run_protocol_trace(spec("lakp"), parse_trace("ReaderInit, TagMsg_A, ReaderMsg", 3),
                                suite(HashImpl::PRF, CombineImpl::Pair), 8);
    REQUIRE(s.messages.size() == 3);
    CHECK(s.messages[2] != zeros(64));
}

TEST_CASE("attack estimates") {
    auto kcl = run_attack("kcl-xor", spec("kcl"), suite(), 200, 1);
    CHECK(kcl.advantage >= 0.99);
    auto kclp = run_attack("kcl-xor", spec("kclp"), suite(), 500, 1);
    CHECK(kclp.advantage <= 0.1);
    CHECK(run_attack("kcl-xor", spec("kclp"), suite(HashImpl::CROnly), 500, 1).advantage > 0.3);
    auto forge = run_attack("lak-auth-forge", spec("lak"), suite(), 200, 1);
    CHECK(forge.advantage >= 0.99);
    auto leak = run_attack("lak-leak", spec("lak_stateless"), suite(HashImpl::Leaky), 500, 1);
    CHECK(leak.advantage == doctest::Approx(0.5).epsilon(0.3));
    auto replay_pair = run_attack("lakp-combine-replay", spec("lakp"), suite(HashImpl::PRF, CombineImpl::Pair), 200, 1);
    CHECK(replay_pair.advantage <= 0.01);
    auto replay_xor = run_attack("lakp-combine-replay", spec("lakp"), suite(), 200, 1);
    CHECK(replay_xor.advantage >= 0.99);
    CHECK(kcl.report() == run_attack("kcl-xor", spec("kcl"), suite(), 200, 1).report());
    try {
        run_attack("lak-leak", spec("kcl"), suite(), 10, 1);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompatibleSuite);
    }
}

TEST_CASE("axiom harness") {
    Env env = names_env();
    env.sig_mut().declare_constant("c", Sort::Message);
    auto goal = [&](const std::string& s) { return parse_goal(s, env); };
    CHECK(axiom_harness(goal("n ~ m"), suite(), 500, 3).advantage <= 0.1);
    CHECK(axiom_harness(goal("hash(c, k) ~ n"), suite(), 500, 3).advantage <= 0.1);
    CHECK(axiom_harness(goal("hash(0, k) ~ n"), suite(HashImpl::CROnly), 500, 3).advantage > 0.3);
    CHECK(axiom_harness(goal("n, n ~ n, m"), suite(), 200, 3).advantage > 0.9);
}
