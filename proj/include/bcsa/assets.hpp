#pragma once

#include "bcsa/builders.hpp"

#include <string>
#include <vector>

namespace bcsa {

// A goal shipped under data/goals together with its proof and mutation corpus.
struct BundledGoal {
    std::string name;      // file stem and goal name
    std::string protocol;  // protocol file stem
    std::string trace;
    std::size_t p = 0;
};

const std::vector<BundledGoal>& bundled_goals();
const BundledGoal& bundled_goal(const std::string& name);

// Canonical goal file for a trace of a protocol; byte-stable for fixed inputs.
std::string goal_file_text(const ProtocolSpec& spec, const TraceSpec& trace, const std::string& name);

// Everything below reads protocol files from data_dir/specs and builds from the printed goal file,
// so the scripts refer to the same lets a reader of the file sees.
std::string bundled_goal_text(const std::string& data_dir, const BundledGoal& b);
ProofScript bundled_proof(const std::string& data_dir, const BundledGoal& b);
std::vector<Mutation> bundled_mutations(const std::string& data_dir, const BundledGoal& b);

// Rewrites goals/<name>.bcgoal, proofs/<name>.bcproof and proofs/mutations/<name>/NN_<op>.bcproof.
// Returns the written paths.
std::vector<std::string> write_bundled_assets(const std::string& data_dir);

// Sorted .bcproof files of the mutation corpus of one goal.
std::vector<std::string> mutation_files(const std::string& data_dir, const std::string& name);

}  // namespace bcsa
