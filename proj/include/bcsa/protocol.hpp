#pragma once

#include "bcsa/goal.hpp"
#include "bcsa/syntax.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace bcsa {

using MemoryState = std::map<std::string, Term>;
using Frame = TermList;

struct ActionDef {
    std::string label;  // SetKey_A, TagInit_A, TagMsg_A, ReaderInit, ReaderMsg
    std::string tag;    // empty for reader actions
    std::vector<std::string> fresh;
    std::string emit = "0";
    SrcPos emit_pos;
    std::vector<std::pair<std::string, std::string>> updates;  // location, term text
    std::vector<SrcPos> update_pos;
};

struct ProtocolSpec {
    std::string name;
    Env env;
    std::vector<std::string> tags;
    std::string challenged_left;   // T_{n-1}
    std::string challenged_right;  // T_n
    std::size_t sessions = 0;
    std::vector<std::string> locations;
    // per-tag location stems ("x_k_$i"), used by the key swap
    std::vector<std::string> tag_location_stems;
    MemoryState init;
    std::vector<ActionDef> actions;  // the whole of Gamma_n, in enumeration order

    const ActionDef& action(const std::string& label) const;
    bool has_action(const std::string& label) const;
    // Gamma_n, or Gamma_{n-1} without SetKey_{n-1} for the second phase
    std::vector<std::string> gamma(bool second_phase = false) const;
    std::string location_for(const std::string& stem, const std::string& tag) const;
};

ProtocolSpec parse_spec(std::string_view text);
ProtocolSpec load_spec(const std::string& path);

enum class NameScheme {
    Primed,       // n_T, n_T', n_T'', ...
    StepIndexed,  // n_T_1, n_T_2, ...
};

struct StepResult {
    Term term;
    MemoryState memory;
};

// Fresh names of the action are renamed through `rename` (absent entries keep their template name).
// Declares any renamed name in `env`. Throws UnknownAction or FreshnessClash.
StepResult action_step(const ProtocolSpec& spec, Env& env, const std::string& action, const MemoryState& sigma,
                       const Frame& phi, const std::map<std::string, std::string>& rename = {});

// Folding over `actions` (in the given order) with the scheduler symbol `to`.
StepResult fold(const ProtocolSpec& spec, Env& env, const std::vector<std::string>& actions,
                const MemoryState& sigma, const Frame& phi, const std::map<std::string, std::string>& rename = {});

struct TraceSpec {
    std::vector<std::string> actions;
    std::size_t p = 0;  // number of first-phase actions
};

struct GeneratedGoal {
    Goal goal;
    Env env;  // protocol declarations plus every generated name and label
    std::vector<std::string> comments;
    // per step frames on both sides (frames[i] precedes step i+1); used by proof builders
    std::vector<Frame> left_frames;
    std::vector<Frame> right_frames;
};

GeneratedGoal gen_fixed_trace_goal(const ProtocolSpec& spec, const TraceSpec& trace,
                                   NameScheme scheme = NameScheme::Primed);
GeneratedGoal gen_bounded_goal(const ProtocolSpec& spec, std::size_t m, std::size_t p,
                               NameScheme scheme = NameScheme::StepIndexed);

// Replaces to(phi_i) by the label of the i-th action on each side of a bounded goal and normalizes;
// returns true when the result agrees elementwise with the fixed-trace goal.
bool fold_matches_trace(const ProtocolSpec& spec, const TraceSpec& trace);

TraceSpec parse_trace(const std::string& csv, std::size_t p);

}  // namespace bcsa
