#pragma once

#include "bcsa/goal.hpp"
#include "bcsa/rules.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bcsa {

struct ProofNode {
    RuleInstance rule;
    std::optional<std::string> expect;  // goal text this node must be applied to
    SrcPos expect_pos;
    std::vector<ProofNode> children;
};

struct ProofScript {
    std::optional<std::string> goal_name;
    std::vector<std::pair<std::string, std::string>> lets;  // name, term list text
    std::vector<SrcPos> let_pos;
    // names introduced by the proof itself; they must not be declared by the goal's file
    std::vector<std::string> fresh_names;
    ProofNode root;

    std::size_t node_count() const;
};

// (rule key=value ... child ...); also (goal NAME), (names N ...), (let NAME "terms"), (defproof NAME node), (use NAME)
ProofScript parse_script(std::string_view text);
ProofScript load_script(const std::string& path);

std::string print_script(const ProofScript& s);

struct ProofFailure {
    std::vector<std::size_t> path;  // child indices from the root
    std::size_t step = 0;           // pre-order index of the failing node
    std::string rule;
    std::string goal;  // goal the node was applied to
    SideConditionReport report;

    std::string path_string() const;
};

struct Verdict {
    bool accepted = false;
    std::size_t steps_checked = 0;
    std::optional<ProofFailure> failure;

    std::string describe() const;
};

// `scope` resolves the identifiers used in term-valued parameters; script lets are layered on top.
Verdict check_proof(const ProofScript& script, const Goal& goal, const Env& scope);

// Both paths refer to files; the goal is chosen by the script's (goal NAME) or is the file's first goal.
Verdict check_files(const std::string& goal_path, const std::string& proof_path);

// Derivation of u_0[pi_o(s_0)], ..., u_n[pi_o(s_n)] ~ u_0[n_0], ..., u_n[n_n]
// with s_0 = G(init(seed)) and s_{i+1} = G(pi_S(s_i)).
struct PrngSeparation {
    Goal goal;
    ProofScript script;
};

PrngSeparation build_prng_separation(const std::vector<Context>& contexts, const std::string& seed = "seed",
                                     const std::string& out_prefix = "r");
// Uses contexts[0..n]; throws ContextContainsReservedName or ConfigError.
Verdict check_prng_separation(std::size_t n, const std::vector<Context>& contexts);

// File of declarations plus `context NAME : term-with-?HOLE`.
struct ContextFile {
    Env env;
    std::vector<std::pair<std::string, Context>> contexts;
};
ContextFile parse_context_file(std::string_view text);
ContextFile load_context_file(const std::string& path);

}  // namespace bcsa
