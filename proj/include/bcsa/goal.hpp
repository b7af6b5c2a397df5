#pragma once

#include "bcsa/syntax.hpp"
#include "bcsa/term.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bcsa {

struct Goal {
    TermList left;
    TermList right;

    std::size_t size() const { return left.size(); }
    // equal length, pointwise comparable sorts, ground
    void validate() const;
    friend bool operator==(const Goal& a, const Goal& b) { return a.left == b.left && a.right == b.right; }
};

// "u1, u2 ~ v1, v2"
Goal parse_goal(std::string_view text, const Scope& scope, SrcPos origin = {});
std::string print_goal(const Goal& g, const TermMap<std::string>* abbrev = nullptr);

// Elementwise equality modulo the equational engine.
bool goals_match(const Goal& a, const Goal& b);

struct GoalFile {
    Env env;
    std::vector<std::pair<std::string, Goal>> goals;

    const Goal& get(const std::string& name) const;
    const Goal& first() const;
};

GoalFile parse_goal_file(std::string_view text);
GoalFile load_goal_file(const std::string& path);

// The let names a goal file gives to its non-trivial elements: l<i> and r<i>, first occurrence wins.
std::vector<std::pair<std::string, Term>> goal_abbreviations(const Goal& g);

// Deterministic rendering: declarations, one let per non-trivial element, then the goal line.
std::string write_goal_file(const Signature& sig, const std::string& name, const Goal& g,
                            const std::vector<std::string>& comments = {});

}  // namespace bcsa
