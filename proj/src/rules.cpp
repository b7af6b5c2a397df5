#include "bcsa/rules.hpp"

#include "bcsa/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace bcsa {

namespace {

struct KindName {
    RuleKind kind;
    const char* name;
};

const KindName kKinds[] = {
    {RuleKind::Refl, "Refl"},
    {RuleKind::Sym, "Sym"},
    {RuleKind::Trans, "Trans"},
    {RuleKind::Dup, "Dup"},
    {RuleKind::Congr, "Congr"},
    {RuleKind::Perm, "Perm"},
    {RuleKind::FA, "FA"},
    {RuleKind::IfThen, "IfThen"},
    {RuleKind::CS, "CS"},
    {RuleKind::Indep, "Indep"},
    {RuleKind::EqIndep, "EqIndep"},
    {RuleKind::FreshNonce, "FreshNonce"},
    {RuleKind::CR, "CR"},
    {RuleKind::PRF, "PRF"},
    {RuleKind::PRNG, "PRNG"},
    {RuleKind::PRNG_FS, "PRNG_FS"},
    {RuleKind::CombineInjL, "CombineInjL"},
    {RuleKind::CombineInjR, "CombineInjR"},
    {RuleKind::Absurd, "Absurd"},
};

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string_view rule_name(RuleKind k) {
    for (const auto& kn : kKinds)
        if (kn.kind == k) return kn.name;
    return "?";
}

std::optional<RuleKind> parse_rule_kind(std::string_view s) {
    std::string l = lower(s);
    for (const auto& kn : kKinds)
        if (lower(kn.name) == l) return kn.kind;
    return std::nullopt;
}

const std::vector<RuleKind>& all_rule_kinds() {
    static const std::vector<RuleKind> v = [] {
        std::vector<RuleKind> out;
        for (const auto& kn : kKinds) out.push_back(kn.kind);
        return out;
    }();
    return v;
}

std::string print_value(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Int: return std::to_string(v.num);
        case Value::Kind::Ident: return v.text;
        case Value::Kind::Str: {
            std::string out = "\"";
            for (char c : v.text) {
                if (c == '"' || c == '\\') out += '\\';
                out += c;
            }
            return out + "\"";
        }
        case Value::Kind::List: {
            std::string out = "[";
            for (std::size_t i = 0; i < v.items.size(); ++i) out += (i ? ", " : "") + print_value(v.items[i]);
            return out + "]";
        }
    }
    return "";
}

std::string SideConditionReport::describe() const {
    if (passed) return "passed";
    std::string out(error_code_name(code));
    for (const auto& v : violations) {
        out += ": " + v.condition;
        if (!v.offending.empty()) out += " [" + v.offending + "]";
    }
    return out;
}

namespace {

std::string report_text(ErrorCode code, const Violation& v) {
    SideConditionReport r;
    r.passed = false;
    r.code = code;
    r.violations.push_back(v);
    return r.describe().substr(std::string(error_code_name(code)).size() + 2);
}

}  // namespace

RuleError::RuleError(ErrorCode code, Violation v) : Error(code, report_text(code, v)) {
    report_.passed = false;
    report_.code = code;
    report_.violations.push_back(std::move(v));
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& cond, const Term* t = nullptr) {
    std::string off;
    if (t && t->valid()) {
        off = print_term(*t);
        if (off.size() > 240) off = off.substr(0, 237) + "...";
    }
    throw RuleError(code, {cond, off});
}
[[noreturn]] void violate(const std::string& cond, const Term* t = nullptr) {
    fail(ErrorCode::SideConditionViolation, cond, t);
}
[[noreturn]] void shape(const std::string& cond, const Term* t = nullptr) { fail(ErrorCode::ShapeMismatch, cond, t); }

std::string at_pos(std::size_t i) { return "position " + std::to_string(i + 1); }

// Goal elements are visible to term parameters as @L3, @R3, @L, @R.
class RuleScope : public Scope {
public:
    RuleScope(const Scope& base, const Goal& g) : base_(base), g_(g) {}
    const Signature& sig() const override { return base_.sig(); }
    std::optional<Term> ident(const std::string& id) const override { return base_.ident(id); }
    std::optional<Term> macro(const std::string& f, const TermList& a) const override { return base_.macro(f, a); }
    std::optional<TermList> splice(const std::string& id) const override {
        if (id == "L") return g_.left;
        if (id == "R") return g_.right;
        if (id.size() > 1 && (id[0] == 'L' || id[0] == 'R') &&
            std::all_of(id.begin() + 1, id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            std::size_t k = std::stoul(id.substr(1));
            const TermList& side = id[0] == 'L' ? g_.left : g_.right;
            if (k >= 1 && k <= side.size()) return TermList{side[k - 1]};
            return std::nullopt;
        }
        return base_.splice(id);
    }

private:
    const Scope& base_;
    const Goal& g_;
};

enum class Side { Left, Right };

class Params {
public:
    Params(const RuleInstance& inst, const Scope& scope, const Goal& g, std::initializer_list<const char*> allowed)
        : inst_(inst), scope_(scope, g), n_(g.size()) {
        for (const auto& [k, v] : inst.params) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) shape(std::string(rule_name(inst.kind)) + " does not take parameter '" + k + "'");
        }
    }

    bool has(const char* key) const { return inst_.params.count(key) > 0; }
    const Value& need(const char* key) const {
        auto it = inst_.params.find(key);
        if (it == inst_.params.end()) shape(std::string(rule_name(inst_.kind)) + " needs parameter '" + key + "'");
        return it->second;
    }

    std::size_t index(const Value& v) const {
        if (v.kind != Value::Kind::Int) shape("positions are integers");
        if (v.num < 1 || static_cast<std::size_t>(v.num) > n_)
            fail(ErrorCode::InvalidPosition, "position " + std::to_string(v.num) + " outside 1.." + std::to_string(n_));
        return static_cast<std::size_t>(v.num - 1);
    }
    std::size_t position(const char* key) const { return index(need(key)); }
    std::vector<std::size_t> positions(const char* key) const {
        const Value& v = need(key);
        std::vector<std::size_t> out;
        if (v.kind == Value::Kind::List) {
            for (const auto& x : v.items) out.push_back(index(x));
        } else {
            out.push_back(index(v));
        }
        std::set<std::size_t> uniq(out.begin(), out.end());
        if (uniq.size() != out.size()) shape("repeated position");
        return out;
    }

    Term term_of(const Value& v) const {
        if (v.kind != Value::Kind::Str && v.kind != Value::Kind::Ident) shape("expected a term");
        return guard([&] { return parse_term(v.text, scope_, v.pos); });
    }
    Term term(const char* key) const { return term_of(need(key)); }
    // a quoted comma-separated list, or a list of quoted terms
    TermList terms_of(const Value& v) const {
        if (v.kind == Value::Kind::List) {
            TermList out;
            for (const auto& x : v.items) {
                TermList part = terms_of(x);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        }
        if (v.kind != Value::Kind::Str && v.kind != Value::Kind::Ident) shape("expected a term list");
        return guard([&] { return parse_term_list(v.text, scope_, v.pos); });
    }
    TermList terms(const char* key) const { return terms_of(need(key)); }

    Path path_of(const Value& v) const {
        Path p;
        if (v.kind == Value::Kind::Int) {
            p.push_back(static_cast<std::size_t>(v.num));
            return p;
        }
        if (v.kind != Value::Kind::List) shape("expected a path [i, j, ...]");
        for (const auto& x : v.items) {
            if (x.kind != Value::Kind::Int || x.num < 0) shape("path steps are non-negative integers");
            p.push_back(static_cast<std::size_t>(x.num));
        }
        return p;
    }
    Path path(const char* key, Path dflt = {}) const { return has(key) ? path_of(need(key)) : dflt; }

    std::string ident(const char* key) const {
        const Value& v = need(key);
        if (v.kind != Value::Kind::Ident && v.kind != Value::Kind::Str) shape(std::string("'") + key + "' is a name");
        return v.text;
    }

    bool flag(const char* key) const {
        if (!has(key)) return false;
        const Value& v = need(key);
        if (v.kind == Value::Kind::Int) return v.num != 0;
        return v.text != "false" && v.text != "no";
    }

    Side side(const char* key, Side dflt) const {
        if (!has(key)) return dflt;
        std::string s = lower(ident(key));
        if (s == "l" || s == "left") return Side::Left;
        if (s == "r" || s == "right") return Side::Right;
        shape("side is left or right");
    }

    const Scope& scope() const { return scope_; }

private:
    template <class F>
    auto guard(F&& f) const -> decltype(f()) {
        try {
            return f();
        } catch (const RuleError&) {
            throw;
        } catch (const Error& e) {
            fail(e.code() == ErrorCode::ParseError ? ErrorCode::ShapeMismatch : e.code(), e.what());
        }
    }

    const RuleInstance& inst_;
    RuleScope scope_;
    std::size_t n_;
};

TermList& side_of(Goal& g, Side s) { return s == Side::Left ? g.left : g.right; }

Goal checked(Goal g) {
    try {
        g.validate();
    } catch (const Error& e) {
        fail(e.code(), std::string("premise is ill-formed: ") + e.what());
    }
    return g;
}

Term default_filler(const Term& like) { return like.sort() == Sort::Bool ? t_false() : t_zero(); }

void erase_at(Goal& g, std::size_t i) {
    g.left.erase(g.left.begin() + static_cast<long>(i));
    g.right.erase(g.right.begin() + static_cast<long>(i));
}

// ---------------------------------------------------------------------------

std::vector<Goal> r_refl(const Params& p, const Goal& g) {
    (void)p;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!same_modulo(g.left[i], g.right[i])) shape("sides differ at " + at_pos(i), &g.left[i]);
    return {};
}

std::vector<Goal> r_trans(const Params& p, const Goal& g) {
    const Value& via = p.need("via");
    std::vector<TermList> frames;
    if (via.kind == Value::Kind::List && !via.items.empty() &&
        std::all_of(via.items.begin(), via.items.end(), [](const Value& v) { return v.kind == Value::Kind::List; })) {
        for (const auto& f : via.items) frames.push_back(p.terms_of(f));
    } else if (via.kind == Value::Kind::List) {
        for (const auto& f : via.items) frames.push_back(p.terms_of(f));
    } else {
        frames.push_back(p.terms_of(via));
    }
    std::vector<Goal> out;
    TermList prev = g.left;
    for (const auto& w : frames) {
        out.push_back(checked(Goal{prev, w}));
        prev = w;
    }
    out.push_back(checked(Goal{prev, g.right}));
    return out;
}

bool same_pair(const Goal& g, std::size_t i, std::size_t j) {
    return same_modulo(g.left[i], g.left[j]) && same_modulo(g.right[i], g.right[j]);
}

std::vector<Goal> r_dup(const Params& p, const Goal& g) {
    auto pos = p.positions("pos");
    std::sort(pos.rbegin(), pos.rend());
    Goal out = g;
    for (std::size_t i : pos) {
        bool twin = false;
        for (std::size_t j = 0; j < out.size() && !twin; ++j)
            if (j != i && same_pair(out, i, j)) twin = true;
        if (!twin) violate("no other element equals the pair at " + at_pos(i), &out.left[i]);
        erase_at(out, i);
    }
    return {checked(out)};
}

std::vector<Goal> r_perm(const Params& p, const Goal& g) {
    const Value& v = p.need("order");
    if (v.kind != Value::Kind::List || v.items.size() != g.size())
        shape("order must list every position exactly once");
    std::vector<std::size_t> idx;
    for (const auto& x : v.items) idx.push_back(p.index(x));
    std::set<std::size_t> uniq(idx.begin(), idx.end());
    if (uniq.size() != idx.size()) shape("order is not a permutation");
    Goal out;
    for (std::size_t i : idx) {
        out.left.push_back(g.left[i]);
        out.right.push_back(g.right[i]);
    }
    return {checked(out)};
}

bool same_head(const Term& a, const Term& b) {
    return a.is_app() && b.is_app() && a.head() == b.head() && a.arity() == b.arity() &&
           a.symbol()->kind == b.symbol()->kind;
}

// FA, optionally repeated: keeps decomposing while heads agree, stopping at hashes and names,
// and drops pairs already present elsewhere in the goal (an implicit Dup).
void decompose(const Term& l, const Term& r, bool star, bool top, const Goal& others, Goal& out) {
    auto present = [&](const Term& a, const Term& b) {
        for (std::size_t j = 0; j < others.size(); ++j)
            if (others.left[j] == a && others.right[j] == b) return true;
        for (std::size_t j = 0; j < out.size(); ++j)
            if (out.left[j] == a && out.right[j] == b) return true;
        return false;
    };
    bool split = top || (star && same_head(l, r) && !l.is_app("hash"));
    if (!split) {
        if (star && present(l, r)) return;
        out.left.push_back(l);
        out.right.push_back(r);
        return;
    }
    if (!same_head(l, r)) shape("FA needs the same function symbol on both sides", &l);
    for (std::size_t k = 0; k < l.arity(); ++k) {
        const Term& a = l.arg(k);
        const Term& b = r.arg(k);
        if (star) {
            if (a.is_app() && a == b && a.arity() == 0) continue;  // constants
            decompose(a, b, true, false, others, out);
        } else {
            out.left.push_back(a);
            out.right.push_back(b);
        }
    }
}

std::vector<Goal> r_fa(const Params& p, const Goal& g) {
    auto pos = p.positions("pos");
    bool star = p.flag("star");
    std::sort(pos.rbegin(), pos.rend());
    Goal cur = g;
    for (std::size_t i : pos) {
        const Term l = cur.left[i], r = cur.right[i];
        if (!same_head(l, r)) shape("FA needs the same function symbol on both sides at " + at_pos(i), &l);
        Goal others = cur;
        erase_at(others, i);
        Goal parts;
        decompose(l, r, star, true, others, parts);
        Goal next;
        next.left.assign(cur.left.begin(), cur.left.begin() + static_cast<long>(i));
        next.right.assign(cur.right.begin(), cur.right.begin() + static_cast<long>(i));
        next.left.insert(next.left.end(), parts.left.begin(), parts.left.end());
        next.right.insert(next.right.end(), parts.right.begin(), parts.right.end());
        next.left.insert(next.left.end(), cur.left.begin() + static_cast<long>(i) + 1, cur.left.end());
        next.right.insert(next.right.end(), cur.right.begin() + static_cast<long>(i) + 1, cur.right.end());
        cur = std::move(next);
    }
    return {checked(cur)};
}

std::vector<Goal> r_fresh(const Params& p, const Goal& g) {
    auto pos = p.positions("pos");
    std::sort(pos.rbegin(), pos.rend());
    Goal out = g;
    for (std::size_t i : pos) {
        for (Side s : {Side::Left, Side::Right}) {
            TermList& side = side_of(out, s);
            const Term& n = side[i];
            if (!n.is_name()) shape("FreshNonce needs a name at " + at_pos(i), &n);
            for (std::size_t j = 0; j < side.size(); ++j)
                if (j != i && occurs(n.id(), side[j]))
                    violate("name " + n.id() + " is not fresh: it occurs at " + at_pos(j), &side[j]);
        }
        erase_at(out, i);
    }
    return {checked(out)};
}

void xor_split(const Term& t, const std::string& n, Term& rest, const char* which) {
    TermList leaves;
    std::function<void(const Term&)> walk = [&](const Term& u) {
        if (u.is_app("xor")) {
            walk(u.arg(0));
            walk(u.arg(1));
        } else {
            leaves.push_back(u);
        }
    };
    walk(nf(t));
    auto it = std::find(leaves.begin(), leaves.end(), Term::name(n));
    if (it == leaves.end()) shape(std::string("the ") + which + " element is not an xor with " + n, &t);
    leaves.erase(it);
    rest = t_zero();
    for (auto i = leaves.rbegin(); i != leaves.rend(); ++i) rest = rest == t_zero() ? *i : t_xor(*i, rest);
}

std::vector<Goal> r_indep(const Params& p, const Goal& g) {
    std::size_t i = p.position("pos");
    std::string n = p.ident("name");
    std::string n2 = p.has("name'") ? p.ident("name'") : n;
    Goal out = g;
    for (Side s : {Side::Left, Side::Right}) {
        const std::string& nm = s == Side::Left ? n : n2;
        TermList& side = side_of(out, s);
        Term rest;
        xor_split(side[i], nm, rest, s == Side::Left ? "left" : "right");
        if (occurs(nm, rest)) violate(nm + " occurs in the rest of the xor", &rest);
        for (std::size_t j = 0; j < side.size(); ++j)
            if (j != i && occurs(nm, side[j])) violate(nm + " occurs at " + at_pos(j), &side[j]);
    }
    if (n == n2) {
        // the shared-name form also forbids the name on the opposite side
        for (std::size_t j = 0; j < g.size(); ++j)
            for (const Term* t : {&g.left[j], &g.right[j]})
                if (j != i && occurs(n, *t)) violate(n + " occurs at " + at_pos(j), t);
    }
    erase_at(out, i);
    return {checked(out)};
}

Term rewrite_side_subterm(const Params& p, const Goal& g, Goal& out, const std::function<Term(const Term&)>& f) {
    Side s = p.side("side", Side::Left);
    std::size_t i = p.position("pos");
    Path at = p.path("at");
    TermList& side = side_of(out, s);
    const Term& el = (s == Side::Left ? g.left : g.right)[i];
    Term sub;
    try {
        sub = subterm_at(el, at);
    } catch (const Error& e) {
        fail(ErrorCode::InvalidPosition, e.what(), &el);
    }
    Term repl = f(sub);
    side[i] = replace_at(el, at, repl);
    return repl;
}

std::vector<Goal> r_eqindep(const Params& p, const Goal& g) {
    Goal out = g;
    rewrite_side_subterm(p, g, out, [](const Term& sub) {
        if (!sub.is_app("EQ") || !(sub.arg(0).is_name() || sub.arg(1).is_name()))
            shape("EqIndep needs EQ(n, x) with n a name", &sub);
        if (!derive_false_equality(sub)) violate("the name occurs on the other side of the equality", &sub);
        return t_false();
    });
    return {checked(out)};
}

std::vector<Goal> r_inj(const Params& p, const Goal& g, bool left) {
    Goal out = g;
    rewrite_side_subterm(p, g, out, [&](const Term& sub) {
        // ite(EQ(u, u'), false, EQ(combine(u, v), combine(u', v')))
        bool ok = sub.is_app("ite") && sub.arg(0).is_app("EQ") && sub.arg(1) == t_false() && sub.arg(2).is_app("EQ") &&
                  sub.arg(2).arg(0).is_app("combine") && sub.arg(2).arg(1).is_app("combine");
        if (!ok) shape("expected ite(EQ(u, u'), false, EQ(combine(u, v), combine(u', v')))", &sub);
        std::size_t k = left ? 0 : 1;
        const Term& c1 = sub.arg(2).arg(0);
        const Term& c2 = sub.arg(2).arg(1);
        if (sub.arg(0) != t_eq(c1.arg(k), c2.arg(k)))
            violate(std::string("the guard does not compare the ") + (left ? "first" : "second") +
                        " arguments of combine",
                    &sub);
        return t_false();
    });
    return {checked(out)};
}

std::vector<Goal> r_congr(const Params& p, const Goal& g) {
    Goal out = g;
    if (p.has("lift")) {
        Side s = p.side("side", Side::Left);
        auto pos = p.positions("pos");
        const Value& lv = p.need("lift");
        std::vector<Path> paths;
        if (lv.kind == Value::Kind::List && !lv.items.empty() && lv.items[0].kind == Value::Kind::List) {
            for (const auto& x : lv.items) paths.push_back(p.path_of(x));
        } else {
            paths.push_back(p.path_of(lv));
        }
        for (std::size_t i : pos) {
            Term& el = side_of(out, s)[i];
            for (const auto& path : paths) {
                try {
                    el = lift_if(el, path);
                } catch (const Error& e) {
                    fail(ErrorCode::InvalidPosition, e.what(), &el);
                }
            }
        }
        return {checked(out)};
    }
    auto pos = p.positions("pos");
    if (!p.has("left") && !p.has("right")) shape("Congr needs left=, right= or lift=");
    for (Side s : {Side::Left, Side::Right}) {
        const char* key = s == Side::Left ? "left" : "right";
        if (!p.has(key)) continue;
        TermList targets = p.terms(key);
        if (targets.size() != pos.size())
            shape(std::string(key) + " gives " + std::to_string(targets.size()) + " term(s) for " +
                  std::to_string(pos.size()) + " position(s)");
        for (std::size_t k = 0; k < pos.size(); ++k) {
            Term& el = side_of(out, s)[pos[k]];
            if (!same_modulo(el, targets[k]))
                violate("not equal modulo the equational theory at " + at_pos(pos[k]) + " (" + key + ")", &targets[k]);
            el = targets[k];
        }
    }
    return {checked(out)};
}

std::vector<Goal> r_ifthen(const Params& p, const Goal& g) {
    Goal out = g;
    Path hole = p.path("hole");
    rewrite_side_subterm(p, g, out, [&](const Term& node) {
        if (!node.is_app("ite") || !node.arg(0).is_app("EQ"))
            shape("IfThen needs ite(EQ(x, y), t, z) at the given path", &node);
        const Term& x = node.arg(0).arg(0);
        const Term& y = node.arg(0).arg(1);
        Term ctx = node.arg(1);
        Term at;
        try {
            at = subterm_at(ctx, hole);
        } catch (const Error& e) {
            fail(ErrorCode::InvalidPosition, e.what(), &ctx);
        }
        Term repl;
        if (at == x) {
            repl = y;
        } else if (at == y) {
            repl = x;
        } else {
            violate("the hole holds neither side of the tested equality", &at);
        }
        Term nctx;
        try {
            nctx = replace_at(ctx, hole, repl);
        } catch (const Error& e) {
            fail(e.code(), e.what(), &ctx);
        }
        return t_ite(node.arg(0), nctx, node.arg(2));
    });
    return {checked(out)};
}

std::vector<Goal> r_cs(const Params& p, const Goal& g) {
    auto pos = p.positions("pos");
    std::sort(pos.begin(), pos.end());
    Term b, b2;
    for (std::size_t i : pos) {
        const Term& l = g.left[i];
        const Term& r = g.right[i];
        if (!l.is_app("ite") || !r.is_app("ite")) shape("CS needs conditionals at " + at_pos(i), &l);
        if (!b.valid()) {
            b = l.arg(0);
            b2 = r.arg(0);
        } else if (l.arg(0) != b || r.arg(0) != b2) {
            shape("split elements do not share one condition", &l);
        }
    }
    auto fillers = [&](const char* key, Side s) {
        std::vector<Term> z;
        if (p.has(key)) {
            TermList given = p.terms(key);
            if (given.size() == 1) given.assign(pos.size(), given[0]);
            if (given.size() != pos.size()) shape(std::string(key) + " must give one term or one per position");
            z = given;
        } else {
            for (std::size_t i : pos) z.push_back(default_filler((s == Side::Left ? g.left : g.right)[i].arg(1)));
        }
        return z;
    };
    auto zl = fillers("z", Side::Left);
    auto zr = fillers("z'", Side::Right);
    auto premise = [&](bool then_case) {
        Goal out = g;
        for (std::size_t k = 0; k < pos.size(); ++k) {
            std::size_t i = pos[k];
            const Term& l = g.left[i];
            const Term& r = g.right[i];
            try {
                out.left[i] = then_case ? t_ite(b, l.arg(1), zl[k]) : t_ite(b, zl[k], l.arg(2));
                out.right[i] = then_case ? t_ite(b2, r.arg(1), zr[k]) : t_ite(b2, zr[k], r.arg(2));
            } catch (const Error& e) {
                fail(e.code(), e.what(), &l);
            }
        }
        out.left.insert(out.left.begin() + static_cast<long>(pos[0]), b);
        out.right.insert(out.right.begin() + static_cast<long>(pos[0]), b2);
        return checked(out);
    };
    return {premise(true), premise(false)};
}

std::vector<Goal> r_cr(const Params& p, const Goal& g) {
    std::size_t i = p.position("pos");
    std::string k = p.ident("key");
    Side s = g.left[i] == t_false() ? Side::Right : Side::Left;
    const TermList& hs = s == Side::Left ? g.left : g.right;
    const TermList& fs = s == Side::Left ? g.right : g.left;
    const Term& b = hs[i];
    if (fs[i] != t_false()) shape("CR compares against false", &fs[i]);
    bool ok = b.is_app("ite") && b.arg(0).is_app("EQ") && b.arg(1) == t_false() && b.arg(2).is_app("EQ");
    if (!ok) shape("expected ite(EQ(t, t'), false, EQ(hash(t, k), hash(t', k)))", &b);
    const Term& t1 = b.arg(0).arg(0);
    const Term& t2 = b.arg(0).arg(1);
    if (b.arg(2) != t_eq(t_hash(t1, Term::name(k)), t_hash(t2, Term::name(k))))
        shape("the hashed equality does not match the guard under key " + k, &b);
    TermList scan{t1, t2};
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (j == i) continue;
        if (!same_modulo(g.left[j], g.right[j])) shape("context differs across sides at " + at_pos(j), &g.left[j]);
        scan.push_back(hs[j]);
    }
    for (const auto& t : scan)
        if (!key_only_in_key_position(k, {t})) violate("key " + k + " occurs outside a hash key position", &t);
    return {};
}

// atoms of a disjunction written as nested conditionals
void disjuncts(const Term& c, TermList& out) {
    if (c == t_false()) return;
    if (c.is_app("ite") && c.arg(1) == t_true()) {
        disjuncts(c.arg(0), out);
        disjuncts(c.arg(2), out);
        return;
    }
    out.push_back(c);
}

// ite(c1, 0, ite(c2, 0, ... core)) -> atoms of c1, c2, ... and the core
Term strip_guards(const Term& t, TermList& atoms) {
    Term cur = t;
    while (cur.is_app("ite") && cur.arg(1) == t_zero()) {
        disjuncts(cur.arg(0), atoms);
        cur = cur.arg(2);
    }
    return cur;
}

bool atom_matches(const Term& atom, const Term& ti, const Term& t) {
    if (!atom.is_app("EQ")) return false;
    const Term& a = atom.arg(0);
    const Term& b = atom.arg(1);
    return (same_modulo(a, ti) && same_modulo(b, t)) || (same_modulo(a, t) && same_modulo(b, ti));
}

std::vector<Goal> r_prf(const Params& p, const Goal& g) {
    std::size_t i = p.position("pos");
    std::string k = p.ident("key");
    std::string n = p.ident("fresh");
    TermList la, ra;
    Term lc = strip_guards(g.left[i], la);
    Term rc = strip_guards(g.right[i], ra);
    Side s;
    if (p.has("side")) {
        s = p.side("side", Side::Left);
    } else {
        s = lc.is_app("hash") ? Side::Left : Side::Right;
    }
    const TermList& hs = s == Side::Left ? g.left : g.right;
    const TermList& ns = s == Side::Left ? g.right : g.left;
    const Term& core = s == Side::Left ? lc : rc;
    const Term& ncore = s == Side::Left ? rc : lc;
    const TermList& hatoms = s == Side::Left ? la : ra;
    const TermList& natoms = s == Side::Left ? ra : la;
    if (!core.is_app("hash") || !core.arg(1).is_name() || core.arg(1).id() != k)
        shape("expected a guarded hash(t, " + k + ")", &core);
    if (!ncore.is_name() || ncore.id() != n) shape("expected the guarded fresh name " + n, &ncore);
    const Term& t = core.arg(0);

    TermList u;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (j == i) continue;
        if (!same_modulo(hs[j], ns[j])) shape("context differs across sides at " + at_pos(j), &hs[j]);
        u.push_back(hs[j]);
    }
    TermList scan = u;
    scan.push_back(t);
    TermList expected;
    try {
        expected = hashed_arguments(k, scan);
    } catch (const Error& e) {
        violate(e.what());
    }
    // every previously hashed message must be tested, and nothing else
    for (const TermList* atoms : {&hatoms, &natoms}) {
        for (const auto& ti : expected) {
            bool found = false;
            for (const auto& a : *atoms) found = found || atom_matches(a, ti, t);
            if (!found) violate("missing equality test against a message hashed under " + k, &ti);
        }
        for (const auto& a : *atoms) {
            bool found = false;
            for (const auto& ti : expected) found = found || atom_matches(a, ti, t);
            if (!found) violate("guard is not a test against a hashed message", &a);
        }
    }
    for (const auto& x : scan)
        if (occurs(n, x)) violate("fresh name " + n + " occurs in the context", &x);
    for (const auto& a : hatoms)
        if (occurs(n, a)) violate("fresh name " + n + " occurs in the guard", &a);
    for (const auto& x : ns)
        if (x != ns[i] && occurs(n, x)) violate("fresh name " + n + " occurs in the context", &x);
    return {};
}

// s_0 = G(init(n)), s_{i+1} = G(pi_S(s_i))
std::vector<Goal> r_prng(const Params& p, const Goal& g, bool forward) {
    (void)p;
    std::size_t m = g.size();
    if (forward) {
        if (m < 2) shape("PRNG_FS needs outputs and the leaked state");
        if (g.left.back() != g.right.back()) shape("the leaked state must be identical on both sides", &g.left.back());
        --m;
    }
    if (m == 0) shape("PRNG needs at least one output");
    bool left_outputs = g.left[0].is_app("pi_o");
    const TermList& outs = left_outputs ? g.left : g.right;
    const TermList& names = left_outputs ? g.right : g.left;
    Term state;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < m; ++i) {
        if (!outs[i].is_app("pi_o")) shape("expected pi_o(s_i) at " + at_pos(i), &outs[i]);
        const Term& s = outs[i].arg(0);
        if (!s.is_app("G")) shape("expected G(...) as generator state", &s);
        if (i == 0) {
            const Term& in = s.arg(0);
            if (!in.is_app("init") || !in.arg(0).is_name()) shape("s_0 must be G(init(n))", &s);
            seen.insert(in.arg(0).id());
        } else if (s.arg(0) != mk("pi_S", {state})) {
            shape("state at " + at_pos(i) + " does not continue the chain", &s);
        }
        state = s;
        if (!names[i].is_name()) shape("expected a name at " + at_pos(i), &names[i]);
        if (!seen.insert(names[i].id()).second) violate("names are not pairwise distinct", &names[i]);
    }
    if (forward && g.left.back() != mk("pi_S", {state}))
        shape("the leaked state must be pi_S(s_n)", &g.left.back());
    return {};
}

}  // namespace

std::vector<Goal> apply_rule(const RuleInstance& inst, const Goal& goal, const Scope& scope) {
    switch (inst.kind) {
        case RuleKind::Refl: return r_refl(Params(inst, scope, goal, {}), goal);
        case RuleKind::Sym: {
            Params p(inst, scope, goal, {});
            return {Goal{goal.right, goal.left}};
        }
        case RuleKind::Trans: return r_trans(Params(inst, scope, goal, {"via"}), goal);
        case RuleKind::Dup: return r_dup(Params(inst, scope, goal, {"pos"}), goal);
        case RuleKind::Perm: return r_perm(Params(inst, scope, goal, {"order"}), goal);
        case RuleKind::FA: return r_fa(Params(inst, scope, goal, {"pos", "star"}), goal);
        case RuleKind::FreshNonce: return r_fresh(Params(inst, scope, goal, {"pos"}), goal);
        case RuleKind::Indep: return r_indep(Params(inst, scope, goal, {"pos", "name", "name'"}), goal);
        case RuleKind::EqIndep: return r_eqindep(Params(inst, scope, goal, {"side", "pos", "at"}), goal);
        case RuleKind::CombineInjL: return r_inj(Params(inst, scope, goal, {"side", "pos", "at"}), goal, true);
        case RuleKind::CombineInjR: return r_inj(Params(inst, scope, goal, {"side", "pos", "at"}), goal, false);
        case RuleKind::Congr: return r_congr(Params(inst, scope, goal, {"pos", "left", "right", "lift", "side"}), goal);
        case RuleKind::IfThen: return r_ifthen(Params(inst, scope, goal, {"side", "pos", "at", "hole"}), goal);
        case RuleKind::CS: return r_cs(Params(inst, scope, goal, {"pos", "z", "z'"}), goal);
        case RuleKind::CR: return r_cr(Params(inst, scope, goal, {"pos", "key"}), goal);
        case RuleKind::PRF: return r_prf(Params(inst, scope, goal, {"pos", "key", "fresh", "side"}), goal);
        case RuleKind::PRNG: return r_prng(Params(inst, scope, goal, {}), goal, false);
        case RuleKind::PRNG_FS: return r_prng(Params(inst, scope, goal, {}), goal, true);
        case RuleKind::Absurd: {
            Params p(inst, scope, goal, {});
            return {Goal{{t_true()}, {t_false()}}};
        }
    }
    shape("unknown rule");
}

SideConditionReport check_side_conditions(const RuleInstance& inst, const Goal& goal, const Scope& scope) {
    try {
        apply_rule(inst, goal, scope);
        return {};
    } catch (const RuleError& e) {
        return e.report();
    } catch (const Error& e) {
        SideConditionReport r;
        r.passed = false;
        r.code = e.code();
        r.violations.push_back({e.what(), ""});
        return r;
    }
}

std::string pretty_rule(const RuleInstance& inst, const Goal* goal) {
    auto get = [&](const char* k) -> std::string {
        auto it = inst.params.find(k);
        if (it == inst.params.end()) return "";
        const Value& v = it->second;
        return v.kind == Value::Kind::Str || v.kind == Value::Kind::Ident ? v.text : print_value(v);
    };
    std::string name(rule_name(inst.kind));
    switch (inst.kind) {
        case RuleKind::Trans: {
            auto it = inst.params.find("via");
            std::string w;
            if (it != inst.params.end()) {
                const Value& v = it->second;
                if (v.kind == Value::Kind::List) {
                    for (std::size_t i = 0; i < v.items.size(); ++i) {
                        const Value& x = v.items[i];
                        w += (i ? "; " : "") + (x.kind == Value::Kind::Str ? x.text : print_value(x));
                    }
                } else {
                    w = v.text;
                }
            }
            return "Trans via ⟨" + w + "⟩";
        }
        case RuleKind::FA: {
            std::string pos = get("pos");
            std::string sym;
            auto it = inst.params.find("pos");
            if (goal && it != inst.params.end() && it->second.kind == Value::Kind::Int) {
                long long k = it->second.num;
                if (k >= 1 && static_cast<std::size_t>(k) <= goal->size() && goal->left[k - 1].is_app())
                    sym = goal->left[k - 1].head();
            }
            std::string star = inst.params.count("star") ? "*" : "";
            return "FA" + star + "(" + (sym.empty() ? "" : sym + " ") + "@" + pos + ")";
        }
        case RuleKind::PRF: return "PRF_n(" + get("key") + ", fresh " + get("fresh") + ")";
        case RuleKind::CR: return "CR(" + get("key") + " @" + get("pos") + ")";
        case RuleKind::FreshNonce:
        case RuleKind::Dup: return name + "(@" + get("pos") + ")";
        case RuleKind::Indep: return "Indep(" + get("name") + " @" + get("pos") + ")";
        case RuleKind::CS: return "CS(@" + get("pos") + ")";
        case RuleKind::Perm: return "Perm" + get("order");
        default: break;
    }
    if (inst.params.empty()) return name;
    std::string out = name + "(";
    bool first = true;
    for (const auto& [k, v] : inst.params) {
        out += (first ? "" : ", ") + k + "=" + print_value(v);
        first = false;
    }
    return out + ")";
}

}  // namespace bcsa
