#include "bcsa/assets.hpp"
#include "bcsa/normalize.hpp"
#include "bcsa/repro.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace bcsa;

namespace {

Env scope_of(const std::vector<std::string>& decls) {
    Env env;
    for (const auto& d : decls)
        for (const auto& st : split_statements(d))
            if (!apply_declaration(env, st)) throw Error(ErrorCode::ParseError, "not a declaration: " + st.keyword);
    return env;
}

py::dict verdict_dict(const Verdict& v) {
    py::dict d;
    d["accepted"] = v.accepted;
    d["steps"] = v.steps_checked;
    d["message"] = v.describe();
    if (v.failure) {
        d["failure_path"] = v.failure->path_string();
        d["rule"] = v.failure->rule;
    } else {
        d["failure_path"] = py::none();
        d["rule"] = py::none();
    }
    return d;
}

py::dict estimate_dict(const AdvantageEstimate& e) {
    py::dict d;
    d["attack"] = e.attack;
    d["protocol"] = e.protocol;
    d["hash"] = hash_impl_name(e.suite.hash);
    d["combine"] = combine_impl_name(e.suite.combine);
    d["eta"] = e.suite.eta;
    d["trials"] = e.trials;
    d["seed"] = e.seed;
    d["advantage"] = e.advantage;
    d["ci95"] = e.ci95;
    d["successes"] = py::make_tuple(e.successes_world0, e.successes_world1);
    py::dict notes;
    for (const auto& [k, v] : e.notes) notes[py::str(k)] = v;
    d["notes"] = notes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_bcsa, m) {
    m.doc() = "Proof checker, goal generator and attack simulator for tag protocol unlinkability";
    // the message starts with the error code name, e.g. "ParseError: ..."
    py::register_exception<Error>(m, "BcsaError", PyExc_ValueError);

    m.attr("compiled_data_dir") = BCSA_DATA_DIR;

    m.def(
        "parse_term",
        [](const std::string& text, const std::vector<std::string>& decls) {
            return print_term(parse_term(text, scope_of(decls)));
        },
        py::arg("text"), py::arg("decls") = std::vector<std::string>{}, "Parse a term and print it canonically.");

    m.def(
        "normalize",
        [](const std::string& text, const std::vector<std::string>& decls, bool trace) -> py::object {
            NormalizeOptions opts;
            opts.trace = trace;
            auto r = normalize(parse_term(text, scope_of(decls)), opts);
            if (!trace) return py::str(print_term(r.term));
            py::list steps;
            for (const auto& s : r.trace)
                steps.append(py::make_tuple(s.rule, print_term(s.before), print_term(s.after)));
            return py::make_tuple(print_term(r.term), steps);
        },
        py::arg("text"), py::arg("decls") = std::vector<std::string>{}, py::arg("trace") = false,
        "Normal form of a term; with trace=True also the rewrite steps.");

    m.def(
        "generate_goal",
        [](const std::string& spec_path, const std::string& trace, std::size_t p, const std::string& name) {
            return goal_file_text(load_spec(spec_path), parse_trace(trace, p), name);
        },
        py::arg("spec_path"), py::arg("trace"), py::arg("p") = 0, py::arg("name") = "goal",
        "Goal file text of a fixed trace.");

    m.def(
        "check",
        [](const std::string& goal_path, const std::string& proof_path) {
            return verdict_dict(check_files(goal_path, proof_path));
        },
        py::arg("goal_path"), py::arg("proof_path"), "Check a proof script against a goal file.");

    m.def(
        "simulate",
        [](const std::string& attack, const std::string& hash, const std::string& combine, std::size_t eta,
           std::size_t trials, std::uint64_t seed, const std::string& protocol, const std::string& data_dir) {
            std::string proto = protocol.empty() ? attack_protocol(attack) : protocol;
            auto spec = load_spec(data_dir + "/specs/" + proto + ".bcspec");
            PrimitiveSuite suite{parse_hash_impl(hash), parse_combine_impl(combine), eta};
            return estimate_dict(run_attack(attack, spec, suite, trials, seed));
        },
        py::arg("attack"), py::arg("hash"), py::arg("combine"), py::arg("eta"), py::arg("trials"), py::arg("seed"),
        py::arg("protocol") = "", py::arg("data_dir") = BCSA_DATA_DIR, "Estimate the advantage of one attack.");

    m.def("attack_ids", &attack_ids);

    m.def(
        "repro",
        [](const std::string& data_dir, std::uint64_t seed, std::size_t trials, std::size_t harness_trials,
           const std::string& hash) {
            ReproOptions o;
            o.data_dir = data_dir;
            o.seed = seed;
            o.trials = trials;
            o.harness_trials = harness_trials;
            if (!hash.empty()) o.hash_override = parse_hash_impl(hash);
            py::list rows;
            for (const auto& r : run_repro(o)) {
                py::dict d;
                d["group"] = r.group;
                d["id"] = r.id;
                d["measured"] = r.measured;
                d["threshold"] = r.threshold;
                d["pass"] = r.pass;
                rows.append(d);
            }
            return rows;
        },
        py::arg("data_dir") = BCSA_DATA_DIR, py::arg("seed") = 2024, py::arg("trials") = 500,
        py::arg("harness_trials") = 2000, py::arg("hash") = "", "All reproduction rows as dictionaries.");
}
