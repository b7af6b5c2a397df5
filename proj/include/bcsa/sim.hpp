#pragma once

#include "bcsa/goal.hpp"
#include "bcsa/protocol.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace bcsa {

// One bit per byte; lengths are explicit.
using Bits = std::vector<std::uint8_t>;

enum class HashImpl { PRF, Leaky, CROnly };
enum class CombineImpl { Xor, Pair };

struct PrimitiveSuite {
    HashImpl hash = HashImpl::PRF;
    CombineImpl combine = CombineImpl::Xor;
    std::size_t eta = 64;
};

HashImpl parse_hash_impl(const std::string& s);  // prf | leaky | cr-only
CombineImpl parse_combine_impl(const std::string& s);  // xor | pair
std::string hash_impl_name(HashImpl h);
std::string combine_impl_name(CombineImpl c);

Bits zeros(std::size_t n);
Bits random_bits(std::mt19937_64& rng, std::size_t n);
Bits xor_bits(const Bits& a, const Bits& b);  // the shorter operand is padded with zeros
// 16-bit length of the first component, then both components
Bits encode_pair(const Bits& a, const Bits& b);
// malformed input projects to the empty string
Bits project(const Bits& x, int which);
std::string to_hex(const Bits& b);

// adversarial symbol: receives its evaluated arguments (usually a frame prefix)
using AdvProc = std::function<Bits(const std::vector<Bits>&)>;

class Evaluator {
public:
    Evaluator(PrimitiveSuite suite, std::uint64_t seed);

    const PrimitiveSuite& suite() const { return suite_; }

    void bind_name(const std::string& name, Bits value);
    void bind_adversary(const std::string& symbol, AdvProc proc);
    // sample unbound names (and public constants) from the seeded stream on first use
    void set_sample_names(bool on) { sample_names_ = on; }

    // Throws UnboundName / UnboundSymbol.
    Bits eval(const Term& t);

    Bits hash(const Bits& msg, const Bits& key);
    Bits combine(const Bits& a, const Bits& b);
    // honest function outside the built-ins: a random oracle per symbol
    Bits oracle(const std::string& symbol, const Bits& input);

private:
    Bits eval_uncached(const Term& t);
    Bits value_of_name(const std::string& id, bool constant);

    PrimitiveSuite suite_;
    std::mt19937_64 rng_;
    bool sample_names_ = false;
    std::map<std::string, Bits> names_;
    std::map<std::string, Bits> constants_;
    std::map<std::string, AdvProc> adversary_;
    std::map<std::pair<Bits, Bits>, Bits> hash_table_;
    std::map<std::pair<std::string, Bits>, Bits> oracle_table_;
    TermMap<Bits> memo_;
};

Bits eval_term(const Term& t, const PrimitiveSuite& suite, const std::map<std::string, Bits>& name_env,
               const std::map<std::string, AdvProc>& adv_env, std::uint64_t seed = 0);

struct AdvantageEstimate {
    std::string attack;
    std::string protocol;
    PrimitiveSuite suite;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    bool single_world = false;  // acceptance rate of a forgery rather than a two-world distinction
    std::size_t successes_world0 = 0;
    std::size_t successes_world1 = 0;
    double advantage = 0;
    double ci95 = 0;
    std::vector<std::pair<std::string, std::string>> notes;

    // key=value lines, fixed order
    std::string report() const;
    std::string json() const;
};

const std::vector<std::string>& attack_ids();
// the protocol file an attack runs against unless overridden
std::string attack_protocol(const std::string& attack);
// protocols an attack can run against
std::vector<std::string> attack_protocols(const std::string& attack);

// Throws ConfigError for an unknown attack and IncompatibleSuite when the protocol does not fit.
AdvantageEstimate run_attack(const std::string& attack, const ProtocolSpec& spec, const PrimitiveSuite& suite,
                             std::size_t trials, std::uint64_t seed);

// Concrete frame of a fixed trace (the same-tag side). Adversarial symbols forward the last
// message of their frame argument unless bound in `adversary`.
struct Transcript {
    std::vector<Bits> messages;
};
Transcript run_protocol_trace(const ProtocolSpec& spec, const TraceSpec& trace, const PrimitiveSuite& suite,
                              std::uint64_t seed, const std::map<std::string, AdvProc>& adversary = {});

class Cprng {
public:
    Cprng(std::size_t eta, const Bits& seed);
    Bits next();
    const Bits& state() const { return state_; }

private:
    std::size_t eta_;
    Bits state_;
};

// Samples both sides of `goal` `trials` times and reports the best advantage over a battery of
// per-element bit frequencies and pairwise equality frequencies. Adversarial symbols act as the
// identity on their (pair-encoded) arguments.
AdvantageEstimate axiom_harness(const Goal& goal, const PrimitiveSuite& suite, std::size_t trials,
                                std::uint64_t seed);

}  // namespace bcsa
