#include "bcsa/normalize.hpp"

#include <algorithm>
#include <functional>

namespace bcsa {

namespace {

bool is_label(const Term& t) { return t.is_app() && t.arity() == 0 && t.symbol()->label; }

bool fresh_eq(const Term& a, const Term& b) {
    return a.is_name() && !occurs(a.id(), b);
}

void xor_leaves(const Term& t, TermList& out) {
    if (t.is_app("xor")) {
        xor_leaves(t.arg(0), out);
        xor_leaves(t.arg(1), out);
    } else {
        out.push_back(t);
    }
}

class Normalizer {
public:
    Normalizer(const NormalizeOptions& o, TermMap<Term>& memo, std::vector<RewriteStep>* trace)
        : o_(o), memo_(memo), trace_(trace) {}

    Term norm(const Term& t) {
        if (!t.is_app()) return t;
        if (auto it = memo_.find(t); it != memo_.end()) return it->second;
        TermList args;
        args.reserve(t.arity());
        for (const auto& a : t.args()) args.push_back(norm(a));
        Term u = rebuild(t, std::move(args));
        std::string rule;
        Term r = root(u, rule);
        Term out = u;
        if (r != u) {
            if (++steps_ > o_.step_limit)
                throw Error(ErrorCode::ConfigError, "normalization step limit exceeded");
            if (trace_) trace_->push_back({rule, u, r});
            out = norm(r);
        }
        memo_.emplace(t, out);
        if (u != t) memo_.emplace(u, out);
        return out;
    }

private:
    Term root(const Term& u, std::string& rule) {
        const std::string& f = u.head();
        if (f == "EQ") return root_eq(u, rule);
        if (f == "ite") return root_ite(u, rule);
        if (f == "xor") return root_xor(u, rule);
        if ((f == "pi1" || f == "pi2") && u.arg(0).is_app("pair")) {
            rule = f == "pi1" ? "proj1" : "proj2";
            return u.arg(0).arg(f == "pi1" ? 0 : 1);
        }
        return u;
    }

    Term root_eq(const Term& u, std::string& rule) {
        const Term& x = u.arg(0);
        const Term& y = u.arg(1);
        if (x == y) {
            rule = "eq-refl";
            return t_true();
        }
        if (is_label(x) && is_label(y)) {
            rule = "eq-labels";
            return t_false();
        }
        if (x.is_app("combine") && y.is_app("combine")) {
            rule = "combine-inj";
            return t_ite(t_eq(x.arg(0), y.arg(0)), t_ite(t_eq(x.arg(1), y.arg(1)), t_true(), t_false()), t_false());
        }
        if (o_.eq_indep && (fresh_eq(x, y) || fresh_eq(y, x))) {
            rule = "EqIndep";
            return t_false();
        }
        return u;
    }

    Term root_ite(const Term& u, std::string& rule) {
        const Term& b = u.arg(0);
        const Term& x = u.arg(1);
        const Term& y = u.arg(2);
        if (b == t_true()) {
            rule = "ite-true";
            return x;
        }
        if (b == t_false()) {
            rule = "ite-false";
            return y;
        }
        if (x == y) {
            rule = "ite-same";
            return x;
        }
        if (x.is_app("ite") && x.arg(0) == b) {
            rule = "ite-absorb-then";
            return t_ite(b, x.arg(1), y);
        }
        if (y.is_app("ite") && y.arg(0) == b) {
            rule = "ite-absorb-else";
            return t_ite(b, x, y.arg(2));
        }
        // injectivity read left to right; the composed rule above usually fires first
        if (b.is_app("EQ") && x == t_false() && y.is_app("EQ") && y.arg(0).is_app("combine") &&
            y.arg(1).is_app("combine")) {
            const Term &c1 = y.arg(0), &c2 = y.arg(1);
            if (b == t_eq(c1.arg(0), c2.arg(0))) {
                rule = "combine-inj-left";
                return t_false();
            }
            if (b == t_eq(c1.arg(1), c2.arg(1))) {
                rule = "combine-inj-right";
                return t_false();
            }
        }
        // commutation only when the inner condition is smaller, so conditions end up ordered
        if (x.is_app("ite") && compare_terms(x.arg(0), b) < 0) {
            rule = "ite-commute-then";
            const Term& a = x.arg(0);
            return t_ite(a, t_ite(b, x.arg(1), y), t_ite(b, x.arg(2), y));
        }
        if (y.is_app("ite") && compare_terms(y.arg(0), b) < 0) {
            rule = "ite-commute-else";
            const Term& a = y.arg(0);
            return t_ite(a, t_ite(b, x, y.arg(1)), t_ite(b, x, y.arg(2)));
        }
        return u;
    }

    Term root_xor(const Term& u, std::string& rule) {
        TermList leaves;
        xor_leaves(u, leaves);
        std::sort(leaves.begin(), leaves.end(), TermLess());
        TermList kept;
        for (std::size_t i = 0; i < leaves.size();) {
            if (leaves[i] == t_zero()) {
                ++i;
                continue;
            }
            if (i + 1 < leaves.size() && leaves[i] == leaves[i + 1]) {
                i += 2;
                continue;
            }
            kept.push_back(leaves[i++]);
        }
        Term r;
        if (kept.empty()) {
            r = t_zero();
        } else {
            r = kept.back();
            for (std::size_t i = kept.size() - 1; i-- > 0;) r = t_xor(kept[i], r);
        }
        if (r != u) rule = "xor-ac";
        return r;
    }

    const NormalizeOptions& o_;
    TermMap<Term>& memo_;
    std::vector<RewriteStep>* trace_;
    std::size_t steps_ = 0;
};

TermMap<Term>& cache(bool eq_indep) {
    thread_local TermMap<Term> plain, indep;
    TermMap<Term>& c = eq_indep ? indep : plain;
    if (c.size() > 2'000'000) c.clear();
    return c;
}

}  // namespace

NormalForm normalize(const Term& t, const NormalizeOptions& opts) {
    NormalForm out;
    if (opts.trace) {
        TermMap<Term> memo;
        Normalizer n(opts, memo, &out.trace);
        out.term = n.norm(t);
    } else {
        Normalizer n(opts, cache(opts.eq_indep), nullptr);
        out.term = n.norm(t);
    }
    return out;
}

Term nf(const Term& t, bool eq_indep) {
    NormalizeOptions o;
    o.eq_indep = eq_indep;
    return normalize(t, o).term;
}

bool eq_modulo(const Term& a, const Term& b) {
    if (!sort_leq(a.sort(), b.sort()) && !sort_leq(b.sort(), a.sort()))
        throw Error(ErrorCode::SortMismatch, "eq_modulo on terms of sorts " + std::string(sort_name(a.sort())) +
                                                 " and " + std::string(sort_name(b.sort())));
    return a == b || nf(a, true) == nf(b, true);
}

bool same_modulo(const Term& a, const Term& b) {
    return a == b || ((sort_leq(a.sort(), b.sort()) || sort_leq(b.sort(), a.sort())) && nf(a, true) == nf(b, true));
}

Term lift_if(const Term& t, const Path& path) {
    if (path.empty()) throw Error(ErrorCode::InvalidPosition, "the conditional must sit under an application");
    const Term& c = subterm_at(t, path);
    if (!c.is_app("ite")) throw Error(ErrorCode::InvalidPosition, "no conditional at " + path_to_string(path));
    Path parent_path(path.begin(), path.end() - 1);
    const Term& parent = subterm_at(t, parent_path);
    std::size_t i = path.back();
    TermList a1 = parent.args(), a2 = parent.args();
    a1[i] = c.arg(1);
    a2[i] = c.arg(2);
    Term lifted = t_ite(c.arg(0), mk_term(parent.symbol(), a1), mk_term(parent.symbol(), a2));
    return replace_at(t, parent_path, lifted);
}

bool derive_false_equality(const Term& t) {
    if (!t.is_app("EQ") || !(t.arg(0).is_name() || t.arg(1).is_name()))
        throw Error(ErrorCode::ShapeMismatch, "expected EQ(n, x) or EQ(x, n) with n a name");
    return fresh_eq(t.arg(0), t.arg(1)) || fresh_eq(t.arg(1), t.arg(0));
}

}  // namespace bcsa
