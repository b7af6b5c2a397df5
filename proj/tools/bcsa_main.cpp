#include "bcsa/assets.hpp"
#include "bcsa/normalize.hpp"
#include "bcsa/repro.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace bcsa;

namespace {

std::string default_data_dir() {
    if (const char* d = std::getenv("BCSA_DATA_DIR")) return d;
#ifdef BCSA_DATA_DIR
    return BCSA_DATA_DIR;
#else
    return "data";
#endif
}

std::string extension(const std::string& path) { return std::filesystem::path(path).extension().string(); }

// declarations given on the command line ("names a b", "adversarial g", ...), or those of a file
Env scope_from(const std::vector<std::string>& decls, const std::string& file) {
    Env env;
    if (!file.empty()) {
        std::string ext = extension(file);
        if (ext == ".bcspec") env = load_spec(file).env;
        else if (ext == ".bcctx") env = load_context_file(file).env;
        else env = load_goal_file(file).env;
    }
    for (const auto& d : decls)
        for (const auto& st : split_statements(d))
            if (!apply_declaration(env, st))
                throw Error(ErrorCode::ParseError, "not a declaration: " + st.keyword);
    return env;
}

int cmd_parse(const std::string& path) {
    std::string ext = extension(path);
    if (ext == ".bcspec") {
        auto spec = load_spec(path);
        std::cout << "protocol " << spec.name << "\n";
        std::cout << "challenged " << spec.challenged_left << " / " << spec.challenged_right << "\n";
        std::cout << print_declarations(spec.env.sig());
        for (const auto& [loc, t] : spec.init) std::cout << "memory " << loc << " = " << print_term(t) << "\n";
        for (const auto& a : spec.actions) std::cout << "action " << a.label << " : " << a.emit << "\n";
    } else if (ext == ".bcproof") {
        std::cout << print_script(load_script(path));
    } else if (ext == ".bcctx") {
        auto f = load_context_file(path);
        std::cout << print_declarations(f.env.sig());
        for (const auto& [name, c] : f.contexts) std::cout << "context " << name << " : " << print_term(c.term) << "\n";
    } else {
        auto f = load_goal_file(path);
        for (const auto& [name, g] : f.goals) std::cout << "goal " << name << " : " << print_goal(g) << "\n";
    }
    return 0;
}

int cmd_normalize(const std::string& text, const std::vector<std::string>& decls, const std::string& file,
                  bool trace) {
    Env env = scope_from(decls, file);
    NormalizeOptions opts;
    opts.trace = trace;
    auto r = normalize(parse_term(text, env), opts);
    if (trace)
        for (const auto& s : r.trace)
            std::cout << s.rule << ": " << print_term(s.before) << "  ->  " << print_term(s.after) << "\n";
    std::cout << print_term(r.term) << "\n";
    return 0;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + out);
    f << text;
}

int cmd_check(const std::string& goal, const std::string& proof, bool quiet) {
    for (const auto& p : {goal, proof})
        if (!std::filesystem::exists(p)) throw Error(ErrorCode::ConfigError, "no such file: " + p);
    auto v = check_files(goal, proof);
    if (!quiet || !v.accepted) std::cout << v.describe() << "\n";
    if (!v.accepted && v.failure) std::cout << "goal at failure: " << v.failure->goal << "\n";
    return v.accepted ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checker, goal generator and simulator for unlinkability proofs of tag protocols"};
    app.require_subcommand(1);
    std::string data_dir = default_data_dir();
    app.add_option("--data", data_dir, "Directory of bundled specs, goals and proofs")->capture_default_str();

    auto* parse = app.add_subcommand("parse", "Parse a spec, goal, proof or context file and print it canonically");
    std::string parse_path;
    parse->add_option("file", parse_path)->required();

    auto* norm = app.add_subcommand("normalize", "Normalize a term modulo the equational theory");
    std::string norm_term, norm_file;
    std::vector<std::string> norm_decls;
    bool norm_trace = false;
    norm->add_option("term", norm_term)->required();
    norm->add_option("--decl", norm_decls, "Declaration line such as \"names a b\"; repeatable");
    norm->add_option("--scope", norm_file, "Take declarations and lets from this file");
    norm->add_flag("--trace", norm_trace, "Print each rewrite step");

    auto* goal = app.add_subcommand("goal", "Generate the fixed-trace goal file of a protocol");
    std::string goal_spec, goal_trace, goal_name = "goal", goal_out;
    std::size_t goal_p = 0;
    goal->add_option("spec", goal_spec)->required();
    goal->add_option("--trace", goal_trace, "Comma-separated action labels; empty for the empty trace");
    goal->add_option("--p", goal_p, "Number of actions before the challenge")->capture_default_str();
    goal->add_option("--name", goal_name)->capture_default_str();
    goal->add_option("-o,--output", goal_out);

    auto* fold = app.add_subcommand("fold", "Generate the folded goal over all action choices");
    std::string fold_spec, fold_name = "folded", fold_out, fold_compare;
    std::size_t fold_m = 1, fold_p = 0;
    fold->add_option("spec", fold_spec)->required();
    fold->add_option("--steps", fold_m)->capture_default_str();
    fold->add_option("--p", fold_p)->capture_default_str();
    fold->add_option("--name", fold_name)->capture_default_str();
    fold->add_option("-o,--output", fold_out);
    fold->add_option("--compare", fold_compare, "Instead, check the folded goal against this trace (uses --p)");

    auto* check = app.add_subcommand("check", "Check a proof script; exit 0 accepted, 1 rejected, 2 input error");
    std::string check_goal, check_proof;
    bool check_quiet = false;
    check->add_option("goal", check_goal)->required();
    check->add_option("proof", check_proof)->required();
    check->add_flag("-q,--quiet", check_quiet);

    auto* sim = app.add_subcommand("sim", "Estimate the advantage of one attack");
    std::string sim_attack, sim_hash, sim_combine, sim_protocol;
    std::size_t sim_eta = 64, sim_trials = 500;
    std::uint64_t sim_seed = 0;
    bool sim_json = false;
    sim->add_option("--attack", sim_attack)->required()->check(CLI::IsMember(attack_ids()));
    sim->add_option("--hash", sim_hash)->required()->check(CLI::IsMember({"prf", "leaky", "cr-only"}));
    sim->add_option("--combine", sim_combine)->required()->check(CLI::IsMember({"xor", "pair"}));
    sim->add_option("--eta", sim_eta)->required();
    sim->add_option("--trials", sim_trials)->required();
    sim->add_option("--seed", sim_seed)->required();
    sim->add_option("--protocol", sim_protocol, "Protocol file stem; defaults to the attack's protocol");
    sim->add_flag("--json", sim_json);

    auto* repro = app.add_subcommand("repro", "Run every bundled proof, attack and harness row");
    ReproOptions ro;
    std::string repro_hash;
    repro->add_option("--seed", ro.seed)->capture_default_str();
    repro->add_option("--trials", ro.trials)->capture_default_str();
    repro->add_option("--harness-trials", ro.harness_trials)->capture_default_str();
    repro->add_option("--eta", ro.eta)->capture_default_str();
    repro->add_option("--hash", repro_hash, "Use this hash in every attack and harness row")
        ->check(CLI::IsMember({"prf", "leaky", "cr-only"}));

    auto* assets = app.add_subcommand("assets", "Regenerate the bundled goals, proofs and mutation corpora");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*parse) return cmd_parse(parse_path);
        if (*norm) return cmd_normalize(norm_term, norm_decls, norm_file, norm_trace);
        if (*goal) {
            emit(goal_file_text(load_spec(goal_spec), parse_trace(goal_trace, goal_p), goal_name), goal_out);
            return 0;
        }
        if (*fold) {
            auto spec = load_spec(fold_spec);
            if (!fold_compare.empty()) {
                bool ok = fold_matches_trace(spec, parse_trace(fold_compare, fold_p));
                std::cout << (ok ? "match" : "mismatch") << "\n";
                return ok ? 0 : 1;
            }
            auto g = gen_bounded_goal(spec, fold_m, fold_p);
            emit(write_goal_file(g.env.sig(), fold_name, g.goal, g.comments), fold_out);
            return 0;
        }
        if (*check) return cmd_check(check_goal, check_proof, check_quiet);
        if (*sim) {
            std::string proto = sim_protocol.empty() ? attack_protocol(sim_attack) : sim_protocol;
            auto spec = load_spec(data_dir + "/specs/" + proto + ".bcspec");
            PrimitiveSuite suite{parse_hash_impl(sim_hash), parse_combine_impl(sim_combine), sim_eta};
            auto est = run_attack(sim_attack, spec, suite, sim_trials, sim_seed);
            std::cout << (sim_json ? est.json() + "\n" : est.report());
            return 0;
        }
        if (*repro) {
            ro.data_dir = data_dir;
            if (!repro_hash.empty()) ro.hash_override = parse_hash_impl(repro_hash);
            auto rows = run_repro(ro);
            std::cout << format_repro(rows);
            for (const auto& r : rows)
                if (!r.pass) return 1;
            return 0;
        }
        if (*assets) {
            for (const auto& p : write_bundled_assets(data_dir)) std::cout << p << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
