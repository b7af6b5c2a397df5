#pragma once

#include "bcsa/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcsa {

struct ReproOptions {
    std::string data_dir;
    std::uint64_t seed = 2024;
    std::size_t eta = 64;
    std::size_t trials = 500;
    std::size_t harness_trials = 2000;
    // replaces the hash of every attack row and of the harness rows
    std::optional<HashImpl> hash_override;
};

struct ReproRow {
    std::string group;  // proof, mutations, prng, attack, harness
    std::string id;
    std::string measured;
    std::string threshold;  // "report" for rows without a threshold
    bool pass = true;
};

// Bundled proofs, mutation corpora, PRNG separations, all attacks and the axiom battery.
// Failures are rows; only unreadable bundled files raise.
std::vector<ReproRow> run_repro(const ReproOptions& opts);

// Fixed-width table followed by a "summary: X/Y rows pass" line. Contains no timings.
std::string format_repro(const std::vector<ReproRow>& rows);

// The five battery goals of data_dir/goals/axioms.bcgoal, in file order.
std::vector<std::pair<std::string, AdvantageEstimate>> axiom_battery(const std::string& data_dir,
                                                                     const PrimitiveSuite& suite,
                                                                     std::size_t trials, std::uint64_t seed);

}  // namespace bcsa
