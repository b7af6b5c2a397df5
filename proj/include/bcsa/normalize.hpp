#pragma once

#include "bcsa/term.hpp"

#include <string>
#include <vector>

namespace bcsa {

struct RewriteStep {
    std::string rule;
    Term before;
    Term after;
};

struct NormalForm {
    Term term;
    std::vector<RewriteStep> trace;
};

struct NormalizeOptions {
    bool trace = false;
    // rewrite EQ(n, x) and EQ(x, n) to false when the name n does not occur in x
    bool eq_indep = false;
    std::size_t step_limit = 5'000'000;
};

NormalForm normalize(const Term& t, const NormalizeOptions& opts = {});

// Cached normal form without trace.
Term nf(const Term& t, bool eq_indep = false);

// Normal forms coincide, with the lazy freshness rule enabled. Throws SortMismatch on incomparable sorts.
bool eq_modulo(const Term& a, const Term& b);
// Same comparison, never throws; terms of incomparable sorts are unequal.
bool same_modulo(const Term& a, const Term& b);

// Distributes the parent of the conditional at `path` over its branches.
Term lift_if(const Term& t, const Path& path);

// For EQ(n, x) or EQ(x, n) with n a name: true iff n does not occur in x.
bool derive_false_equality(const Term& t);

}  // namespace bcsa
