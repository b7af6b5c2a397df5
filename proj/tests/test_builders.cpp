#include "doctest.h"

#include "bcsa/builders.hpp"

#include <chrono>

using namespace bcsa;

namespace {

std::string data(const std::string& rel) { return std::string(BCSA_DATA_DIR) + "/" + rel; }

struct Loaded {
    GoalFile file;
    Goal goal;
};

Loaded generated(const std::string& proto, const std::string& trace, std::size_t p) {
    auto spec = load_spec(data("specs/" + proto + ".bcspec"));
    auto g = gen_fixed_trace_goal(spec, parse_trace(trace, p));
    Loaded out{parse_goal_file(write_goal_file(g.env.sig(), proto, g.goal, g.comments)), {}};
    out.goal = out.file.first();
    return out;
}

Verdict check_text(const Loaded& l, const ProofScript& s) {
    return check_proof(parse_script(print_script(s)), l.goal, l.file.env);
}

}  // namespace

TEST_CASE("revised tag protocol proofs for several traces") {
    for (const auto& [trace, p] : std::vector<std::pair<std::string, std::size_t>>{
             {"TagMsg_A", 0},
             {"ReaderInit, TagMsg_A", 0},
             {"ReaderInit, TagMsg_A, ReaderInit, TagMsg_A", 0},
             {"TagMsg_A, TagMsg_A, ReaderInit", 0},
             {"ReaderInit, TagMsg_A, TagMsg_A, ReaderInit, TagMsg_A", 0}}) {
        CAPTURE(trace);
        auto l = generated("kclp", trace, p);
        auto s = build_kclp_proof(l.goal);
        auto v = check_text(l, s);
        CHECK_MESSAGE(v.accepted, v.describe());
    }
}

TEST_CASE("revised tag protocol proof rejects a linkable goal") {
    // the same tag on both sides of the first phase, then a different one: not of the challenged shape
    auto l = generated("kcl", "ReaderInit, TagMsg_A", 0);
    CHECK_THROWS_AS(build_kclp_proof(l.goal), Error);
}

TEST_CASE("keyed combine protocol proof for two full sessions") {
    auto l = generated("lakp", "ReaderInit, TagMsg_A, ReaderMsg, ReaderInit, TagMsg_A, ReaderMsg", 3);
    auto s = build_lakp_proof(l.goal, l.file.env);
    auto v = check_text(l, s);
    CHECK_MESSAGE(v.accepted, v.describe());
}

TEST_CASE("every mutation of the bundled proofs is rejected where it was made") {
    auto kclp = generated("kclp", "ReaderInit, TagMsg_A, ReaderInit, TagMsg_A", 0);
    auto lakp = generated("lakp", "ReaderInit, TagMsg_A, ReaderMsg, ReaderInit, TagMsg_A, ReaderMsg", 3);
    for (const auto* l : {&kclp, &lakp}) {
        auto valid = l == &kclp ? build_kclp_proof(l->goal) : build_lakp_proof(l->goal, l->file.env);
        auto ms = mutate_proof(valid, l->goal, l->file.env);
        CHECK(ms.size() >= 10);
        for (const auto& m : ms) {
            CAPTURE(m.name);
            std::string text = write_mutation(m);
            auto v = check_text(*l, parse_script(text));
            CHECK_FALSE(v.accepted);
            CHECK(expected_failure_path(text) == m.expected_path);
            CHECK_MESSAGE(localized(v, m.expected_path), v.describe());
        }
    }
}
