#pragma once

#include "bcsa/proof.hpp"
#include "bcsa/protocol.hpp"

#include <string>

namespace bcsa {

// Fixed-trace goal of the revised tag protocol for reader and tag steps of the challenged pair,
// closed by induction on the trace: a nonce step is dropped by freshness, a tag answer is
// replaced by random values through the keyed hash (PRF) on both sides.
// Terms in the script refer to the l<i>/r<i> lets of the matching goal file.
ProofScript build_kclp_proof(const Goal& goal, const std::string& goal_name = "kclp",
                             const std::string& fresh = "n");

// Two full sessions of the keyed-hash variant with an abstract combine (six messages), the
// second one run by the challenged tag. `env` is the scope of the goal file (its lets are
// used to print the script). Each step is replayed while building, so a goal of another
// shape raises an error instead of producing a script that fails the check.
ProofScript build_lakp_proof(const Goal& goal, const Env& env, const std::string& goal_name = "lakp");

struct Mutation {
    std::string name;
    std::string description;
    ProofScript script;
    // the failure must be reported at this node or below it
    std::vector<std::size_t> expected_path;
};

// At least ten corruptions of a valid script, each targeting one node.
std::vector<Mutation> mutate_proof(const ProofScript& valid, const Goal& goal, const Env& env);

// Script text headed by "; mutation:" and "; expect-failure-at: root.i.j" comment lines.
std::string write_mutation(const Mutation& m);
// The path of the expect-failure-at line; throws ConfigError when there is none.
std::vector<std::size_t> expected_failure_path(std::string_view script_text);
// True when the verdict is a rejection reported at `expected` or inside its subtree.
bool localized(const Verdict& v, const std::vector<std::size_t>& expected);

}  // namespace bcsa
