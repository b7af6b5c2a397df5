#include "bcsa/assets.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace bcsa {

namespace fs = std::filesystem;

const std::vector<BundledGoal>& bundled_goals() {
    static const std::vector<BundledGoal> goals = {
        {"kclp", "kclp", "ReaderInit, TagMsg_A, ReaderInit, TagMsg_A", 0},
        {"lakp", "lakp", "ReaderInit, TagMsg_A, ReaderMsg, ReaderInit, TagMsg_A, ReaderMsg", 3},
    };
    return goals;
}

const BundledGoal& bundled_goal(const std::string& name) {
    for (const auto& b : bundled_goals())
        if (b.name == name) return b;
    throw Error(ErrorCode::ConfigError, "no bundled goal '" + name + "'");
}

std::string goal_file_text(const ProtocolSpec& spec, const TraceSpec& trace, const std::string& name) {
    auto g = gen_fixed_trace_goal(spec, trace);
    return write_goal_file(g.env.sig(), name, g.goal, g.comments);
}

namespace {

ProtocolSpec spec_of(const std::string& data_dir, const BundledGoal& b) {
    return load_spec(data_dir + "/specs/" + b.protocol + ".bcspec");
}

ProofScript build_for(const BundledGoal& b, const GoalFile& f) {
    if (b.protocol == "kclp") return build_kclp_proof(f.get(b.name), b.name);
    if (b.protocol == "lakp") return build_lakp_proof(f.get(b.name), f.env, b.name);
    throw Error(ErrorCode::ConfigError, "no proof builder for protocol " + b.protocol);
}

void write_text(const fs::path& p, const std::string& text, std::vector<std::string>& written) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + p.string());
    out << text;
    written.push_back(p.string());
}

}  // namespace

std::string bundled_goal_text(const std::string& data_dir, const BundledGoal& b) {
    return goal_file_text(spec_of(data_dir, b), parse_trace(b.trace, b.p), b.name);
}

ProofScript bundled_proof(const std::string& data_dir, const BundledGoal& b) {
    return build_for(b, parse_goal_file(bundled_goal_text(data_dir, b)));
}

std::vector<Mutation> bundled_mutations(const std::string& data_dir, const BundledGoal& b) {
    auto f = parse_goal_file(bundled_goal_text(data_dir, b));
    return mutate_proof(build_for(b, f), f.get(b.name), f.env);
}

std::vector<std::string> write_bundled_assets(const std::string& data_dir) {
    std::vector<std::string> written;
    fs::path root(data_dir);
    for (const auto& b : bundled_goals()) {
        write_text(root / "goals" / (b.name + ".bcgoal"), bundled_goal_text(data_dir, b), written);
        write_text(root / "proofs" / (b.name + ".bcproof"), print_script(bundled_proof(data_dir, b)), written);
        fs::path dir = root / "proofs" / "mutations" / b.name;
        if (fs::exists(dir))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".bcproof") fs::remove(e.path());
        auto ms = bundled_mutations(data_dir, b);
        for (std::size_t i = 0; i < ms.size(); ++i) {
            char stem[16];
            std::snprintf(stem, sizeof stem, "%02zu_", i + 1);
            write_text(dir / (stem + ms[i].name + ".bcproof"), write_mutation(ms[i]), written);
        }
    }
    return written;
}

std::vector<std::string> mutation_files(const std::string& data_dir, const std::string& name) {
    std::vector<std::string> out;
    fs::path dir = fs::path(data_dir) / "proofs" / "mutations" / name;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".bcproof") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace bcsa
