#pragma once

// Sort-directed random ground terms over xor, pair, projections, ite, EQ and five names.

#include "bcsa/term.hpp"

#include <random>
#include <string>
#include <vector>

namespace bcsa::testing {

class TermGen {
public:
    explicit TermGen(std::uint64_t seed) : rng_(seed) {}

    static const std::vector<std::string>& names() {
        static const std::vector<std::string> n = {"n1", "n2", "n3", "n4", "n5"};
        return n;
    }

    Term gen(Sort s, int depth) {
        bool leaf = depth <= 0 || pick(4) == 0;
        switch (s) {
            case Sort::Nonce:
                if (leaf) return pick(6) == 5 ? t_zero() : Term::name(names()[pick(5)]);
                if (pick(4) == 0) return t_ite(gen(Sort::Bool, depth - 1), gen(s, depth - 1), gen(s, depth - 1));
                return t_xor(gen(s, depth - 1), gen(s, depth - 1));
            case Sort::Message:
                if (leaf) return gen(Sort::Nonce, 0);
                switch (pick(5)) {
                    case 0: return t_ite(gen(Sort::Bool, depth - 1), gen(s, depth - 1), gen(s, depth - 1));
                    case 1: return mk("pi1", {gen(s, depth - 1)});
                    case 2: return mk("pi2", {gen(s, depth - 1)});
                    case 3: return gen(Sort::Nonce, depth);
                    default: return t_pair(gen(s, depth - 1), gen(s, depth - 1));
                }
            case Sort::Bool:
                if (leaf) return pick(2) ? t_true() : t_false();
                if (pick(4) == 0) return t_ite(gen(s, depth - 1), gen(s, depth - 1), gen(s, depth - 1));
                if (pick(2)) return t_eq(gen(Sort::Nonce, depth - 1), gen(Sort::Nonce, depth - 1));
                return t_eq(gen(Sort::Message, depth - 1), gen(Sort::Message, depth - 1));
        }
        return t_zero();
    }

    Term any(int depth) {
        static const Sort sorts[] = {Sort::Nonce, Sort::Message, Sort::Bool};
        return gen(sorts[pick(3)], depth);
    }

private:
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    std::mt19937_64 rng_;
};

}  // namespace bcsa::testing
