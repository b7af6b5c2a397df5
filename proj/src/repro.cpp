#include "bcsa/repro.hpp"

#include "bcsa/assets.hpp"

#include <algorithm>
#include <cstdio>

namespace bcsa {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

struct AttackRow {
    const char* attack;
    const char* protocol;
    HashImpl hash;
    CombineImpl combine;
    // pass when lo <= advantage <= hi; report-only when lo > hi
    double lo, hi;
};

std::string threshold_text(double lo, double hi) {
    if (lo > hi) return "report";
    if (lo <= 0) return "<= " + fmt(hi);
    if (hi >= 1) return ">= " + fmt(lo);
    return "in [" + fmt(lo) + ", " + fmt(hi) + "]";
}

std::vector<Context> contexts_of(const std::string& path) {
    std::vector<Context> out;
    for (const auto& [name, c] : load_context_file(path).contexts) out.push_back(c);
    return out;
}

}  // namespace

std::vector<std::pair<std::string, AdvantageEstimate>> axiom_battery(const std::string& data_dir,
                                                                     const PrimitiveSuite& suite,
                                                                     std::size_t trials, std::uint64_t seed) {
    auto file = load_goal_file(data_dir + "/goals/axioms.bcgoal");
    std::vector<std::pair<std::string, AdvantageEstimate>> out;
    for (const auto& [name, goal] : file.goals) {
        auto est = axiom_harness(goal, suite, trials, seed);
        est.attack = "harness:" + name;
        out.emplace_back(name, est);
    }
    return out;
}

std::vector<ReproRow> run_repro(const ReproOptions& o) {
    std::vector<ReproRow> rows;
    const std::string& dir = o.data_dir;

    for (const auto& b : bundled_goals()) {
        std::string goal = dir + "/goals/" + b.name + ".bcgoal";
        auto v = check_files(goal, dir + "/proofs/" + b.name + ".bcproof");
        rows.push_back({"proof", b.name,
                        v.accepted ? "accepted, " + std::to_string(v.steps_checked) + " steps" : "rejected",
                        "accepted", v.accepted});

        auto files = mutation_files(dir, b.name);
        std::size_t ok = 0;
        for (const auto& f : files) {
            auto mv = check_files(goal, f);
            if (localized(mv, expected_failure_path(read_file(f)))) ++ok;
        }
        rows.push_back({"mutations", b.name,
                        std::to_string(ok) + "/" + std::to_string(files.size()) + " rejected at the mutated node",
                        ">= 10, all localized", files.size() >= 10 && ok == files.size()});
    }

    for (const char* family : {"hash", "pair", "shared"}) {
        auto ctx = contexts_of(dir + "/prng/" + std::string(family) + ".bcctx");
        for (std::size_t n : {0u, 1u, 2u, 4u}) {
            bool pass = false;
            std::string measured;
            try {
                auto v = check_prng_separation(n, ctx);
                pass = v.accepted;
                measured = pass ? "accepted, " + std::to_string(v.steps_checked) + " steps" : "rejected";
            } catch (const Error& e) {
                measured = std::string("error: ") + e.what();
            }
            rows.push_back({"prng", std::string(family) + " n=" + std::to_string(n), measured, "accepted", pass});
        }
    }

    const std::vector<AttackRow> attacks = {
        {"kcl-xor", "kcl", HashImpl::PRF, CombineImpl::Xor, 0.99, 1},
        {"kcl-xor", "kclp", HashImpl::PRF, CombineImpl::Xor, 0, 0.10},
        {"lak-auth-forge", "lak", HashImpl::PRF, CombineImpl::Xor, 0.99, 1},
        {"lak-leak", "lak_stateless", HashImpl::Leaky, CombineImpl::Xor, 0.35, 0.65},
        {"lakp-combine-replay", "lakp", HashImpl::PRF, CombineImpl::Xor, 0.99, 1},
        {"lakp-combine-replay", "lakp", HashImpl::PRF, CombineImpl::Pair, 0, 0.01},
        {"lakp-combine-link", "lakp", HashImpl::PRF, CombineImpl::Xor, 0.90, 1},
        {"lakp-combine-link", "lakp", HashImpl::PRF, CombineImpl::Pair, 0, 0.10},
        {"lakp-replay-link", "lakp", HashImpl::PRF, CombineImpl::Xor, 1, 0},
        {"lakp-replay-link", "lakp", HashImpl::PRF, CombineImpl::Pair, 1, 0},
    };
    for (const auto& a : attacks) {
        PrimitiveSuite suite{o.hash_override.value_or(a.hash), a.combine, o.eta};
        std::string id = std::string(a.attack) + " " + a.protocol + " " + hash_impl_name(suite.hash) + "/" +
                         combine_impl_name(suite.combine);
        auto spec = load_spec(dir + "/specs/" + a.protocol + ".bcspec");
        auto est = run_attack(a.attack, spec, suite, o.trials, o.seed);
        bool report_only = a.lo > a.hi;
        bool pass = report_only || (est.advantage >= a.lo && est.advantage <= a.hi);
        rows.push_back({"attack", id, fmt(est.advantage) + " +- " + fmt(est.ci95), threshold_text(a.lo, a.hi), pass});
    }

    PrimitiveSuite main{o.hash_override.value_or(HashImpl::PRF), CombineImpl::Xor, o.eta};
    for (const auto& [name, est] : axiom_battery(dir, main, o.harness_trials, o.seed))
        rows.push_back({"harness", name + " " + hash_impl_name(main.hash), fmt(est.advantage), "<= 0.1000",
                        est.advantage <= 0.10});
    PrimitiveSuite cr{HashImpl::CROnly, CombineImpl::Xor, o.eta};
    for (const auto& [name, est] : axiom_battery(dir, cr, o.harness_trials, o.seed))
        if (name == "prf") rows.push_back({"harness", "prf cr-only (control)", fmt(est.advantage), "report", true});
    return rows;
}

std::string format_repro(const std::vector<ReproRow>& rows) {
    std::size_t wg = 5, wi = 2, wm = 8;
    for (const auto& r : rows) {
        wg = std::max(wg, r.group.size());
        wi = std::max(wi, r.id.size());
        wm = std::max(wm, r.measured.size());
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    std::string out = pad("group", wg) + "  " + pad("id", wi) + "  " + pad("measured", wm) + "  status  threshold\n";
    std::size_t passed = 0;
    for (const auto& r : rows) {
        passed += r.pass;
        out += pad(r.group, wg) + "  " + pad(r.id, wi) + "  " + pad(r.measured, wm) + "  " +
               (r.pass ? "PASS  " : "FAIL  ") + "  " + r.threshold + "\n";
    }
    out += "summary: " + std::to_string(passed) + "/" + std::to_string(rows.size()) + " rows pass\n";
    return out;
}

}  // namespace bcsa
