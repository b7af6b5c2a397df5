#include "bcsa/builders.hpp"

#include "bcsa/normalize.hpp"
#include "bcsa/rules.hpp"

#include <functional>

namespace bcsa {

namespace {

using Kids = std::vector<ProofNode>;

ProofNode node(RuleKind k, std::initializer_list<std::pair<const char*, Value>> params = {}, Kids kids = {}) {
    ProofNode n;
    n.rule.kind = k;
    for (const auto& [key, v] : params) n.rule.params[key] = v;
    n.children = std::move(kids);
    return n;
}

Value I(std::size_t v) { return Value::integer(static_cast<long long>(v)); }
Value S(std::string s) { return Value::str(std::move(s)); }
Value Id(std::string s) { return Value::ident(std::move(s)); }
Value Ints(std::vector<std::size_t> v) {
    std::vector<Value> out;
    for (auto x : v) out.push_back(I(x));
    return Value::list(std::move(out));
}
Value Strs(std::vector<std::string> v) {
    std::vector<Value> out;
    for (auto& x : v) out.push_back(S(std::move(x)));
    return Value::list(std::move(out));
}

std::string range(const char* side, std::size_t from, std::size_t to) {
    std::string s = std::string("@") + side;
    return from == to ? s + std::to_string(from) : s + std::to_string(from) + ".." + std::to_string(to);
}

// prefix of a side, followed by `extra`
std::string frame(const char* side, std::size_t len, const std::string& extra) {
    if (len == 0) return extra;
    return range(side, 1, len) + ", " + extra;
}

class KclpBuilder {
public:
    KclpBuilder(const Goal& g, std::string fresh) : g_(g), n_(std::move(fresh)) {
        for (const auto& [id, t] : goal_abbreviations(g)) ab_.emplace(t, id);
    }

    ProofNode root() {
        std::size_t N = g_.size();
        if (N == 0) shape("empty goal");
        const Term& last = g_.left.back();
        if (!last.is_app("g_guess")) return prefix(N);
        std::size_t k = last.arity();
        if (k != N - 1) shape("the guess must read the whole frame");
        if (k == 0) return node(RuleKind::FA, {{"pos", I(N)}}, {node(RuleKind::Refl)});
        std::vector<std::size_t> copies;
        for (std::size_t i = N; i < 2 * k + 1; ++i) copies.push_back(i);
        return node(RuleKind::FA, {{"pos", I(N)}},
                    {node(RuleKind::Dup, {{"pos", Ints(copies)}}, {prefix(k)})});
    }

private:
    [[noreturn]] static void shape(const std::string& msg) {
        throw Error(ErrorCode::ShapeMismatch, "cannot build the proof: " + msg);
    }

    std::string pr(const Term& t) const { return print_term(t, &ab_); }

    // proof of the first j elements of both sides
    ProofNode prefix(std::size_t j) {
        if (j == 0) return node(RuleKind::Refl);
        const Term& l = g_.left[j - 1];
        if (l.is_name()) return node(RuleKind::FreshNonce, {{"pos", I(j)}}, {prefix(j - 1)});
        if (l.is_app("pair")) return tag_step(j);
        shape("unexpected element " + print_term(l));
    }

    struct Answer {
        Term id, nonce, key_hash, chal_hash;  // <id (+) key_hash, nonce (+) chal_hash>
        std::string key;
    };

    static Answer answer(const Term& t) {
        auto bad = [&] { shape("not a tag answer: " + print_term(t)); };
        if (!t.is_app("pair") || !t.arg(0).is_app("xor") || !t.arg(1).is_app("xor")) bad();
        Answer a;
        a.id = t.arg(0).arg(0);
        a.key_hash = t.arg(0).arg(1);
        a.nonce = t.arg(1).arg(0);
        a.chal_hash = t.arg(1).arg(1);
        if (!a.key_hash.is_app("hash") || a.key_hash.arg(0) != a.nonce || !a.key_hash.arg(1).is_name()) bad();
        a.key = a.key_hash.arg(1).id();
        return a;
    }

    ProofNode tag_step(std::size_t j) {
        Answer L = answer(g_.left[j - 1]);
        Answer R = answer(g_.right[j - 1]);
        if (L.nonce != R.nonce || !L.nonce.is_name()) shape("tag nonces differ across sides");
        // after FA and Perm: psi, id (+) hash(n_T, k)  at positions 1..j, j+1
        std::vector<std::size_t> order;
        for (std::size_t i = 1; i < j; ++i) order.push_back(i);
        order.push_back(j + 1);
        order.push_back(j);

        TermList psi_l(g_.left.begin(), g_.left.begin() + static_cast<long>(j - 1));
        psi_l.push_back(g_.left[j - 1].arg(1));
        TermList psi_r(g_.right.begin(), g_.right.begin() + static_cast<long>(j - 1));
        psi_r.push_back(g_.right[j - 1].arg(1));

        ProofNode left_part = node(
            RuleKind::FA, {{"pos", I(j + 1)}},
            {node(RuleKind::FA, {{"pos", I(j + 1)}}, {hash_to_random(psi_l, L.nonce, L.key, j + 1)})});
        ProofNode right_part = node(
            RuleKind::FA, {{"pos", I(j + 1)}},
            {node(RuleKind::FA, {{"pos", I(j + 1)}},
                  {node(RuleKind::Sym, {}, {hash_to_random(psi_r, R.nonce, R.key, j + 1)})})});
        ProofNode id_swap = node(RuleKind::Indep, {{"pos", I(j + 1)}, {"name", Id(n_)}}, {psi_sim(j, L.nonce.id())});
        ProofNode p1 = node(RuleKind::Trans, {{"via", S(frame("R", j, pr(R.id) + " (+) " + n_))}},
                            {id_swap, right_part});
        ProofNode split = node(RuleKind::Trans, {{"via", S(frame("L", j, pr(L.id) + " (+) " + n_))}},
                               {left_part, p1});
        return node(RuleKind::FA, {{"pos", I(j)}}, {node(RuleKind::Perm, {{"order", Ints(order)}}, {split})});
    }

    // phi, n_T (+) hash(g(phi), k_A) ~ phi~, n_T (+) hash(g(phi~), k_B) through phi, n_T ~ phi~, n_T
    ProofNode psi_sim(std::size_t j, const std::string& nonce) {
        std::vector<std::string> via{frame("L", j - 1, nonce), frame("R", j - 1, nonce)};
        auto indep = [&](ProofNode child) {
            return node(RuleKind::Indep, {{"pos", I(j)}, {"name", Id(nonce)}}, {std::move(child)});
        };
        return node(RuleKind::Trans, {{"via", Strs(via)}},
                    {indep(node(RuleKind::Refl)), indep(prefix(j - 1)), indep(node(RuleKind::Refl))});
    }

    // psi, hash(n_T, k) ~ psi, n  with the hash at position P: split on every earlier message
    // hashed under k, close the equal cases by freshness and the rest by PRF
    ProofNode hash_to_random(const TermList& psi, const Term& nonce, const std::string& key, std::size_t P) {
        TermList scan = psi;
        scan.push_back(nonce);
        TermList ms = hashed_arguments(key, scan);
        std::string at = std::to_string(P);
        std::function<ProofNode(std::size_t)> step = [&](std::size_t i) -> ProofNode {
            if (i == ms.size())
                return node(RuleKind::PRF, {{"pos", I(P)}, {"key", Id(key)}, {"fresh", Id(n_)}});
            std::string e = "EQ(" + pr(nonce) + ", " + pr(ms[i]) + ")";
            ProofNode then_case = node(RuleKind::Congr,
                                       {{"pos", Ints({P, P + 1})},
                                        {"left", Strs({"false", "0"})},
                                        {"right", Strs({"false", "0"})}},
                                       {node(RuleKind::Refl)});
            ProofNode else_case = node(
                RuleKind::Congr, {{"pos", I(P)}, {"left", S("false")}, {"right", S("false")}},
                {node(RuleKind::FA, {{"pos", I(P)}}, {step(i + 1)})});
            return node(RuleKind::Congr,
                        {{"pos", I(P)},
                         {"left", S("ite(" + e + ", @L" + at + ", @L" + at + ")")},
                         {"right", S("ite(" + e + ", @R" + at + ", @R" + at + ")")}},
                        {node(RuleKind::CS, {{"pos", I(P)}}, {then_case, else_case})});
        };
        return step(0);
    }

    const Goal& g_;
    std::string n_;
    TermMap<std::string> ab_;
};


// Builds by replaying: every node is applied to its goal right away and the continuation
// receives the premises, so positions and guard sets come from the actual subgoals.
class LakpBuilder {
public:
    using Cont = std::function<ProofNode(const Goal&)>;

    LakpBuilder(const Goal& g, const Env& env) : g_(g), env_(env) {
        for (const auto& [id, t] : goal_abbreviations(g)) ab_.emplace(t, id);
        for (const char* n : {"n", "n2", "n3"}) {
            if (env_.sig().has(n) || env_.sig().is_name(n)) shape(std::string("name ") + n + " is taken");
            env_.sig_mut().declare_name(n);
        }
    }

    ProofNode root() {
        if (g_.size() != 7 || !g_.left.back().is_app("g_guess") || g_.left.back().arity() != 6)
            shape("expected six messages followed by the guess");
        return chain(g_, {node(RuleKind::FA, {{"pos", I(7)}}), node(RuleKind::Dup, {{"pos", Ints({7, 8, 9, 10, 11, 12})}})},
                     [this](const Goal& g) { return second_session(g); });
    }

private:
    [[noreturn]] static void shape(const std::string& msg) {
        throw Error(ErrorCode::ShapeMismatch, "cannot build the proof: " + msg);
    }

    std::string pr(const Term& t) const { return print_term(t, &ab_); }

    ProofNode by(const Goal& g, ProofNode n, const std::vector<Cont>& ks) {
        std::vector<Goal> prem;
        try {
            prem = apply_rule(n.rule, g, env_);
        } catch (const Error& e) {
            shape(std::string(rule_name(n.rule.kind)) + " failed (" + e.what() + ") on " + print_goal(g, &ab_));
        }
        if (prem.size() != ks.size())
            shape(std::string(rule_name(n.rule.kind)) + " gave an unexpected number of premises");
        for (std::size_t i = 0; i < prem.size(); ++i) n.children.push_back(ks[i](prem[i]));
        return n;
    }

    ProofNode chain(const Goal& g, std::vector<ProofNode> steps, const Cont& last) {
        if (steps.empty()) return last(g);
        ProofNode head = steps.front();
        steps.erase(steps.begin());
        return by(g, head, {[this, steps, last](const Goal& h) { return chain(h, steps, last); }});
    }

    ProofNode refl(const Goal& g) { return by(g, node(RuleKind::Refl), {}); }

    // drop constant-zero pairs and repeated pairs, one rule at a time
    ProofNode tidy(const Goal& g, const Cont& last) {
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.left[i] == t_zero() && g.right[i] == t_zero())
                return by(g, node(RuleKind::FA, {{"pos", I(i + 1)}}), {[this, last](const Goal& h) { return tidy(h, last); }});
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (g.left[i] == g.left[j] && g.right[i] == g.right[j])
                    return by(g, node(RuleKind::Dup, {{"pos", I(i + 1)}}),
                              {[this, last](const Goal& h) { return tidy(h, last); }});
        return last(g);
    }

    static Term strip(const Term& t, TermList* atoms = nullptr) {
        Term cur = t;
        while (cur.is_app("ite") && cur.arg(1) == t_zero()) {
            if (atoms) atoms->push_back(cur.arg(0));
            cur = cur.arg(2);
        }
        return cur;
    }

    static Term replace_core(const Term& t, const Term& by_term) {
        if (t.is_app("ite") && t.arg(1) == t_zero()) return t_ite(t.arg(0), t.arg(1), replace_core(t.arg(2), by_term));
        return by_term;
    }

    // 1-based position of the first element whose unguarded core is a hash
    static std::size_t hash_position(const Goal& g, std::size_t from = 0) {
        for (std::size_t i = from; i < g.size(); ++i)
            if (strip(g.left[i]).is_app("hash")) return i + 1;
        shape("no hash left in " + print_goal(g));
    }

    std::string frame_with(const char* side, std::size_t N, std::size_t P, const Term& x) const {
        std::string out;
        if (P > 1) out = range(side, 1, P - 1) + ", ";
        out += pr(x);
        if (P < N) out += ", " + range(side, P + 1, N);
        return out;
    }

    // the guarded hash at P becomes the fresh name on both sides
    ProofNode hash_swap(const Goal& g, std::size_t P, const std::string& fresh, const Cont& rest) {
        Term n = Term::name(fresh);
        std::vector<std::string> via{frame_with("L", g.size(), P, replace_core(g.left[P - 1], n)),
                                     frame_with("R", g.size(), P, replace_core(g.right[P - 1], n))};
        return by(g, node(RuleKind::Trans, {{"via", Strs(via)}}),
                  {[this, P, fresh](const Goal& h) { return prf_close(h, P, fresh); }, rest,
                   [this, P, fresh](const Goal& h) {
                       return by(h, node(RuleKind::Sym), {[this, P, fresh](const Goal& k) { return prf_close(k, P, fresh); }});
                   }});
    }

    // PRF at P, after guarding both sides with the equality tests the rule asks for
    ProofNode prf_close(const Goal& g, std::size_t P, const std::string& fresh) {
        TermList atoms;
        Term core = strip(g.left[P - 1], &atoms);
        if (!core.is_app("hash") || !core.arg(1).is_name()) shape("expected a hash at " + std::to_string(P));
        std::string key = core.arg(1).id();
        const Term& t = core.arg(0);
        TermList scan;
        for (std::size_t j = 0; j < g.size(); ++j)
            if (j + 1 != P) scan.push_back(g.left[j]);
        scan.push_back(t);
        std::string left = "@L" + std::to_string(P), right = "@R" + std::to_string(P);
        bool guarded = false;
        TermList expected = hashed_arguments(key, scan);
        for (auto it = expected.rbegin(); it != expected.rend(); ++it) {
            bool covered = false;
            for (const auto& a : atoms)
                covered = covered || (a.is_app("EQ") && ((same_modulo(a.arg(0), t) && same_modulo(a.arg(1), *it)) ||
                                                         (same_modulo(a.arg(1), t) && same_modulo(a.arg(0), *it))));
            if (covered) continue;
            std::string e = "EQ(" + pr(t) + ", " + pr(*it) + ")";
            left = "ite(" + e + ", 0, " + left + ")";
            right = "ite(" + e + ", 0, " + right + ")";
            guarded = true;
        }
        ProofNode prf = node(RuleKind::PRF, {{"pos", I(P)}, {"key", Id(key)}, {"fresh", Id(fresh)}});
        if (!guarded) return by(g, prf, {});
        return chain(g, {node(RuleKind::Congr, {{"pos", I(P)}, {"left", S(left)}, {"right", S(right)}})},
                     [this, prf](const Goal& h) { return by(h, prf, {}); });
    }

    // n_R, s, t, n_R', alpha, T: open alpha and the reader answer down to its two hashes,
    // then split on whether the two hashed messages agree
    ProofNode second_session(const Goal& g) {
        auto fa = [](std::size_t i) { return node(RuleKind::FA, {{"pos", I(i)}}); };
        // T = ite(EQ(b, pi2(g(..))), c, 0): keep b and c, the rest already occurs
        return chain(g, {fa(6)}, [this, fa](const Goal& g1) {
            return tidy(g1, [this, fa](const Goal& g2) {
                return chain(g2, {fa(6), fa(7), fa(7)}, [this, fa](const Goal& g3) {
                    return tidy(g3, [this, fa](const Goal& g4) {
                        return chain(g4, {fa(5)}, [this](const Goal& h) { return split_answers(h); });
                    });
                });
            });
        });
    }

    ProofNode split_answers(const Goal& h) {
        {
            {
                         if (h.size() != 8 || !h.left[6].is_app("hash") || !h.left[7].is_app("hash"))
                             shape("unexpected reader answer: " + print_goal(h, &ab_));
                         auto cond = [&](const TermList& side) {
                             return "EQ(" + pr(side[6].arg(0)) + ", " + pr(side[7].arg(0)) + ")";
                         };
                         std::string cl = cond(h.left), cr = cond(h.right);
                         auto wrap = [](const std::string& c, const char* s, int i) {
                             std::string a = std::string("@") + s + std::to_string(i);
                             return "ite(" + c + ", " + a + ", " + a + ")";
                         };
                         return chain(h,
                                      {node(RuleKind::Congr, {{"pos", Ints({7, 8})},
                                                              {"left", Strs({wrap(cl, "L", 7), wrap(cl, "L", 8)})},
                                                              {"right", Strs({wrap(cr, "R", 7), wrap(cr, "R", 8)})}})},
                                      [this](const Goal& k) {
                                          return by(k, node(RuleKind::CS, {{"pos", Ints({7, 8})}}),
                                                    {[this](const Goal& x) { return equal_case(x); },
                                                     [this](const Goal& x) { return distinct_case(x); }});
                                      });
            }
        }
    }

    // ctx, e, ite(e, b, 0), ite(e, c, 0): rewrite c into b under the test, keep one copy
    ProofNode equal_case(const Goal& g) {
        auto lift = [](const char* side) {
            return node(RuleKind::IfThen, {{"side", Id(side)}, {"pos", I(9)}, {"at", Ints({})}, {"hole", Ints({0})}});
        };
        return chain(g, {lift("left"), lift("right"), node(RuleKind::Dup, {{"pos", I(9)}}), node(RuleKind::FA, {{"pos", I(8)}})},
                     [this](const Goal& h) { return tidy(h, [this](const Goal& k) { return reader_hash(k); }); });
    }

    // ctx, e, ite(e, 0, b), ite(e, 0, c)
    ProofNode distinct_case(const Goal& g) { return reader_hash(g); }

    // ctx, e, X[, Y] with X a guarded hash: its message may still equal the one of the tag answer
    ProofNode reader_hash(const Goal& g) {
        if (g.size() != 8 && g.size() != 9) shape("unexpected goal before the reader hash: " + print_goal(g, &ab_));
        auto test = [&](const TermList& side) {
            TermList guards;
            Term core = strip(side[7], &guards);
            if (!core.is_app("hash") || !side[5].is_app("hash")) shape("expected two hashes: " + print_goal(g, &ab_));
            return "EQ(" + pr(core.arg(0)) + ", " + pr(side[5].arg(0)) + ")";
        };
        TermList guards;
        strip(g.left[7], &guards);
        std::vector<Value> hole(guards.size(), I(2));
        hole.push_back(I(0));
        std::string tl = test(g.left), tr = test(g.right);
        auto lift = [hole](const char* side) {
            return node(RuleKind::IfThen,
                        {{"side", Id(side)}, {"pos", I(9)}, {"at", Ints({})}, {"hole", Value::list(hole)}});
        };
        return chain(g,
                     {node(RuleKind::Congr, {{"pos", I(8)},
                                             {"left", S("ite(" + tl + ", @L8, @L8)")},
                                             {"right", S("ite(" + tr + ", @R8, @R8)")}})},
                     [this, lift](const Goal& h) {
                         return by(h, node(RuleKind::CS, {{"pos", I(8)}}),
                                   {[this, lift](const Goal& x) {
                                        // both hashes coincide: the reader hash is the tag hash
                                        return chain(x, {lift("left"), lift("right")},
                                                     [this](const Goal& y) { return absorb(y); });
                                    },
                                    [this](const Goal& x) {
                                        return hash_swap(x, 9, "n", [this](const Goal& y) { return absorb(y); });
                                    }});
                     });
    }

    // remove every element past the six of the first answer: copies, zeros, our fresh names,
    // and applications whose arguments are removed in turn
    ProofNode absorb(const Goal& g) {
        auto again = [this](const Goal& h) { return absorb(h); };
        if (g.size() == 6) return first_answer(g);
        for (std::size_t i = g.size(); i-- > 6;) {
            const Term& l = g.left[i];
            const Term& r = g.right[i];
            for (std::size_t j = 0; j < g.size(); ++j)
                if (j != i && g.left[j] == l && g.right[j] == r)
                    return by(g, node(RuleKind::Dup, {{"pos", I(std::max(i, j) + 1)}}), {again});
            if (l.is_name() && l == r && (l.id() == "n" || l.id() == "n2"))
                return by(g, node(RuleKind::FreshNonce, {{"pos", I(i + 1)}}), {again});
            if (l.is_app() && !l.is_app("hash") && (l.arity() > 0 || l == t_zero()))
                return by(g, node(RuleKind::FA, {{"pos", I(i + 1)}}), {again});
        }
        // what is left are bare or guarded hashes of the reader answers
        for (std::size_t i = 6; i < g.size(); ++i) {
            if (!strip(g.left[i]).is_app("hash")) continue;
            for (const char* n : {"n", "n2"}) {
                bool used = false;
                for (const auto& t : g.left) used = used || occurs(n, t);
                for (const auto& t : g.right) used = used || occurs(n, t);
                if (!used) return hash_swap(g, i + 1, n, again);
            }
        }
        shape("cannot reduce " + print_goal(g, &ab_));
    }

    // n_R, s, t, n_R', n_T', hash(...) ~ same with the other key
    ProofNode first_answer(const Goal& g) {
        return hash_swap(g, 6, "n3", [this](const Goal& h) { return refl(h); });
    }

    const Goal& g_;
    Env env_;
    TermMap<std::string> ab_;
};

}  // namespace

ProofScript build_kclp_proof(const Goal& goal, const std::string& goal_name, const std::string& fresh) {
    ProofScript s;
    s.goal_name = goal_name;
    s.fresh_names.push_back(fresh);
    s.root = KclpBuilder(goal, fresh).root();
    return s;
}

ProofScript build_lakp_proof(const Goal& goal, const Env& env, const std::string& goal_name) {
    ProofScript s;
    s.goal_name = goal_name;
    s.fresh_names = {"n", "n2", "n3"};
    s.root = LakpBuilder(goal, env).root();
    return s;
}

}  // namespace bcsa
