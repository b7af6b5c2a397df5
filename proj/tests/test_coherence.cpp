#include "doctest.h"

#include "bcsa/normalize.hpp"
#include "bcsa/sim.hpp"

#include "random_terms.hpp"

using namespace bcsa;

TEST_CASE("normal forms evaluate like the original terms") {
    testing::TermGen gen(11);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
        Term t = gen.any(5);
        Term n = nf(t);
        CAPTURE(print_term(t));
        for (int e = 0; e < 10; ++e) {
            std::map<std::string, Bits> env;
            for (const auto& name : testing::TermGen::names()) env[name] = random_bits(rng, 64);
            CHECK(eval_term(t, PrimitiveSuite{}, env, {}) == eval_term(n, PrimitiveSuite{}, env, {}));
        }
    }
}
