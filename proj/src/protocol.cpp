#include "bcsa/protocol.hpp"

#include "bcsa/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace bcsa {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string replace_var(std::string s, const std::string& var, const std::string& value) {
    std::size_t at = 0;
    while ((at = s.find(var, at)) != std::string::npos) {
        s.replace(at, var.size(), value);
        at += value.size();
    }
    return s;
}

std::vector<std::string> expand(const std::string& s, const std::string& var, const std::vector<std::string>& values) {
    if (s.find(var) == std::string::npos) return {s};
    std::vector<std::string> out;
    for (const auto& v : values) out.push_back(replace_var(s, var, v));
    return out;
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

[[noreturn]] void config(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

const char* const kTagActions[] = {"SetKey", "TagInit", "TagMsg"};
const char* const kReaderActions[] = {"ReaderInit", "ReaderMsg"};

// Identifiers resolve to memory locations, `@phi` to the current frame, and next(x) steps a session counter.
class TemplateScope : public Scope {
public:
    TemplateScope(Env& env, const MemoryState& sigma, const Frame& phi, const std::map<std::string, std::string>& fresh)
        : env_(env), sigma_(sigma), phi_(phi), fresh_(fresh) {}

    const Signature& sig() const override { return env_.sig(); }
    std::optional<Term> ident(const std::string& id) const override {
        if (auto it = fresh_.find(id); it != fresh_.end()) return Term::name(it->second);
        if (auto it = sigma_.find(id); it != sigma_.end()) return it->second;
        return env_.ident(id);
    }
    std::optional<TermList> splice(const std::string& id) const override {
        if (id == "phi") return phi_;
        return env_.splice(id);
    }
    std::optional<Term> macro(const std::string& f, const TermList& args) const override {
        if (f == "next" && args.size() == 1) return next(args[0]);
        return std::nullopt;
    }

private:
    Term next(const Term& t) const {
        if (t.is_app("ite")) return t_ite(t.arg(0), next(t.arg(1)), next(t.arg(2)));
        const std::string& h = t.head();
        std::size_t k = h.size();
        while (k > 0 && std::isdigit(static_cast<unsigned char>(h[k - 1]))) --k;
        if (!t.is_app() || t.arity() != 0 || k == h.size() || !t.symbol()->label)
            throw Error(ErrorCode::ConfigError, "next() expects a numbered label, got " + print_term(t));
        std::string succ = h.substr(0, k) + std::to_string(std::stoul(h.substr(k)) + 1);
        Signature& sig = env_.sig_mut();
        if (!sig.has(succ)) sig.declare_label(succ);
        return mk_term(sig.require(succ), {});
    }

    Env& env_;
    const MemoryState& sigma_;
    const Frame& phi_;
    const std::map<std::string, std::string>& fresh_;
};

struct Effect {
    Term term;
    // updated locations; the location's own metavariable stands for its value before the update
    std::map<std::string, Term> theta;
};

Term location_var(const std::string& loc) { return Term::metavar(loc, Sort::Message); }

Effect effect_of(const ProtocolSpec& spec, Env& env, const std::string& label, const MemoryState& sigma,
                 const Frame& phi, const std::map<std::string, std::string>& rename) {
    if (!spec.has_action(label)) throw Error(ErrorCode::UnknownAction, "no action '" + label + "'");
    const ActionDef& def = spec.action(label);
    // only the action's own fresh names are renamed, so that earlier nonces in the frame keep their names
    std::map<std::string, std::string> fresh;
    for (const auto& b : def.fresh) {
        auto it = rename.find(b);
        std::string r = it == rename.end() ? b : it->second;
        if (!env.sig().is_name(r)) env.sig_mut().declare_name(r);
        fresh[b] = r;
    }
    for (const auto& [b, r] : fresh) {
        bool clash = occurs_in(r, phi);
        for (const auto& [loc, v] : sigma) clash = clash || occurs(r, v);
        if (clash) throw Error(ErrorCode::FreshnessClash, "name " + r + " of " + label + " is already in use");
    }
    TemplateScope scope(env, sigma, phi, fresh);
    Effect e;
    e.term = parse_term(def.emit, scope, def.emit_pos);
    for (std::size_t k = 0; k < def.updates.size(); ++k) {
        const auto& [loc, text] = def.updates[k];
        if (!sigma.count(loc)) throw Error(ErrorCode::ConfigError, label + " updates unknown location " + loc);
        e.theta[loc] = parse_term(text, scope, def.update_pos[k]);
    }
    return e;
}

Effect fold_effect(const ProtocolSpec& spec, Env& env, const std::vector<std::string>& actions,
                   const MemoryState& sigma, const Frame& phi, const std::map<std::string, std::string>& rename) {
    if (actions.empty()) config("cannot fold an empty action set");
    Effect acc = effect_of(spec, env, actions[0], sigma, phi, rename);
    if (actions.size() == 1) return acc;
    Term to = mk_term(env.sig().require("to"), phi);
    for (std::size_t k = 1; k < actions.size(); ++k) {
        Effect e = effect_of(spec, env, actions[k], sigma, phi, rename);
        Term b = t_eq(to, mk_term(env.sig().require(actions[k]), {}));
        acc.term = t_ite(b, e.term, acc.term);
        std::set<std::string> locs;
        for (const auto& [l, v] : acc.theta) locs.insert(l);
        for (const auto& [l, v] : e.theta) locs.insert(l);
        for (const auto& l : locs) {
            Term mine = e.theta.count(l) ? e.theta[l] : location_var(l);
            Term prev = acc.theta.count(l) ? acc.theta[l] : location_var(l);
            acc.theta[l] = mine == prev ? mine : t_ite(b, mine, prev);
        }
    }
    return acc;
}

MemoryState apply_effect(const MemoryState& base, const Effect& e) {
    MemoryState out = base;
    for (const auto& [loc, v] : e.theta) out[loc] = substitute(v, {{loc, base.at(loc)}});
    return out;
}

std::map<std::string, std::string> step_names(const ProtocolSpec& spec, const std::vector<std::string>& actions,
                                              std::size_t step, NameScheme scheme,
                                              std::map<std::string, std::size_t>& uses) {
    std::set<std::string> bases;
    for (const auto& a : actions)
        if (spec.has_action(a))
            for (const auto& b : spec.action(a).fresh) bases.insert(b);
    std::map<std::string, std::string> out;
    for (const auto& b : bases) {
        std::size_t k = uses[b]++;
        out[b] = scheme == NameScheme::Primed ? b + std::string(k, '\'') : b + "_" + std::to_string(step);
    }
    return out;
}

// {x_{n-1} -> sigma(x_n)} for every per-tag location on the right; the left keeps its own value
MemoryState swapped(const ProtocolSpec& spec, const MemoryState& sigma) {
    MemoryState out = sigma;
    for (const auto& stem : spec.tag_location_stems)
        out[spec.location_for(stem, spec.challenged_left)] = sigma.at(spec.location_for(stem, spec.challenged_right));
    return out;
}

void check_trace(const ProtocolSpec& spec, const TraceSpec& trace) {
    if (trace.p > trace.actions.size())
        config("split point " + std::to_string(trace.p) + " exceeds trace length " +
               std::to_string(trace.actions.size()));
    auto second = spec.gamma(true);
    for (std::size_t i = 0; i < trace.actions.size(); ++i) {
        const std::string& a = trace.actions[i];
        if (!spec.has_action(a)) throw Error(ErrorCode::UnknownAction, "no action '" + a + "'");
        if (i >= trace.p && std::find(second.begin(), second.end(), a) == second.end())
            throw Error(ErrorCode::IllegalCorruption, "action " + a + " at step " + std::to_string(i + 1) +
                                                          " is not allowed once the challenge has started");
    }
}

Term guess(const Env& env, const Frame& phi) { return mk_term(env.sig().require("g_guess"), phi); }

}  // namespace

const ActionDef& ProtocolSpec::action(const std::string& label) const {
    for (const auto& a : actions)
        if (a.label == label) return a;
    throw Error(ErrorCode::UnknownAction, "no action '" + label + "'");
}

bool ProtocolSpec::has_action(const std::string& label) const {
    return std::any_of(actions.begin(), actions.end(), [&](const ActionDef& a) { return a.label == label; });
}

std::vector<std::string> ProtocolSpec::gamma(bool second_phase) const {
    std::vector<std::string> out;
    for (const auto& a : actions) {
        if (second_phase && a.tag == challenged_right) continue;
        if (second_phase && a.label == "SetKey_" + challenged_left) continue;
        out.push_back(a.label);
    }
    return out;
}

std::string ProtocolSpec::location_for(const std::string& stem, const std::string& tag) const {
    return replace_var(stem, "$i", tag);
}

ProtocolSpec parse_spec(std::string_view text) {
    ProtocolSpec spec;
    std::vector<std::string> session_ids;
    std::map<std::string, ActionDef> defined;
    auto need_tags = [&](const Statement& st) {
        if (spec.tags.empty()) parse_fail(st.pos, "'tags' must come before any use of $i");
    };
    for (const auto& st : split_statements(text)) {
        std::string full = st.keyword + " " + st.rest;
        bool per_tag = full.find("$i") != std::string::npos;
        if (per_tag && st.keyword != "action") need_tags(st);
        if (st.keyword == "protocol") {
            spec.name = trim(st.rest);
        } else if (st.keyword == "tags") {
            spec.tags = words(st.rest);
            if (spec.tags.size() < 2) parse_fail(st.rest_pos, "at least two tags are needed");
        } else if (st.keyword == "challenge") {
            auto w = words(st.rest);
            if (w.size() != 2) parse_fail(st.rest_pos, "expected two tags");
            spec.challenged_left = w[0];
            spec.challenged_right = w[1];
        } else if (st.keyword == "sessions") {
            try {
                spec.sessions = std::stoul(trim(st.rest));
            } catch (const std::exception&) {
                parse_fail(st.rest_pos, "expected a session count");
            }
            session_ids.clear();
            for (std::size_t j = 1; j <= spec.sessions; ++j) session_ids.push_back(std::to_string(j));
        } else if (st.keyword == "memory") {
            auto eq = st.rest.find('=');
            if (eq == std::string::npos) parse_fail(st.rest_pos, "expected 'memory LOCATION = term'");
            std::string stem = trim(st.rest.substr(0, eq));
            if (stem.find("$i") != std::string::npos) spec.tag_location_stems.push_back(stem);
            for (const auto& line : expand(st.rest, "$i", spec.tags)) {
                for (const auto& l2 : expand(line, "$j", session_ids)) {
                    auto e2 = l2.find('=');
                    std::string loc = trim(l2.substr(0, e2));
                    if (spec.init.count(loc)) parse_fail(st.rest_pos, "location " + loc + " declared twice");
                    SrcPos at = st.rest_pos;
                    at.col += static_cast<int>(eq) + 1;
                    spec.init[loc] = parse_term(l2.substr(e2 + 1), spec.env, at);
                    spec.locations.push_back(loc);
                }
            }
        } else if (st.keyword == "action") {
            auto nl = st.rest.find('\n');
            std::string head = trim(st.rest.substr(0, nl));
            std::string body = nl == std::string::npos ? "" : st.rest.substr(nl + 1);
            if (head.find("$i") != std::string::npos) need_tags(st);
            for (const auto& tag : head.find("$i") != std::string::npos ? spec.tags : std::vector<std::string>{""}) {
                ActionDef def;
                def.label = tag.empty() ? head : replace_var(head, "$i", tag);
                def.tag = tag;
                if (defined.count(def.label)) parse_fail(st.pos, "action " + def.label + " defined twice");
                std::string b = tag.empty() ? body : replace_var(body, "$i", tag);
                std::istringstream lines(b);
                std::string line;
                int lineno = st.pos.line;
                std::string* last = nullptr;
                bool emitted = false;
                while (std::getline(lines, line)) {
                    ++lineno;
                    std::string t = trim(line);
                    if (t.empty() || t[0] == ';') continue;
                    SrcPos at{lineno, static_cast<int>(line.find_first_not_of(" \t")) + 1};
                    auto w = words(t);
                    std::string rest = trim(t.substr(w[0].size()));
                    at.col += static_cast<int>(w[0].size()) + 1;
                    if (w[0] == "fresh") {
                        for (std::size_t k = 1; k < w.size(); ++k) def.fresh.push_back(w[k]);
                        last = nullptr;
                    } else if (w[0] == "emit") {
                        if (emitted) parse_fail(at, "emit given twice");
                        emitted = true;
                        def.emit = rest;
                        def.emit_pos = at;
                        last = &def.emit;
                    } else if (w[0] == "update") {
                        auto eq = rest.find('=');
                        if (eq == std::string::npos) parse_fail(at, "expected 'update LOCATION = term'");
                        for (const auto& u : expand(rest, "$j", session_ids)) {
                            auto e2 = u.find('=');
                            def.updates.emplace_back(trim(u.substr(0, e2)), u.substr(e2 + 1));
                            SrcPos up = at;
                            up.col += static_cast<int>(eq) + 1;
                            def.update_pos.push_back(up);
                        }
                        last = def.updates.size() == 1 || rest.find("$j") == std::string::npos
                                   ? &def.updates.back().second
                                   : nullptr;
                    } else if (last) {
                        *last += " " + t;
                    } else {
                        parse_fail(at, "expected fresh, emit or update");
                    }
                }
                defined[def.label] = std::move(def);
            }
        } else {
            std::vector<std::string> expanded = expand(full, "$i", spec.tags);
            for (auto& e : expanded) {
                for (const auto& e2 : expand(e, "$j", session_ids)) {
                    auto sp = e2.find(' ');
                    Statement s2 = st;
                    s2.keyword = e2.substr(0, sp);
                    s2.rest = sp == std::string::npos ? "" : e2.substr(sp + 1);
                    if (!apply_declaration(spec.env, s2)) parse_fail(st.pos, "unknown statement '" + st.keyword + "'");
                }
            }
        }
    }
    if (spec.tags.size() < 2) config("spec declares no tags");
    if (spec.challenged_left.empty()) {
        spec.challenged_left = spec.tags[spec.tags.size() - 2];
        spec.challenged_right = spec.tags.back();
    }
    for (const auto& t : {spec.challenged_left, spec.challenged_right})
        if (std::find(spec.tags.begin(), spec.tags.end(), t) == spec.tags.end()) config("unknown challenged tag " + t);
    if (spec.challenged_left == spec.challenged_right) config("challenged tags must differ");

    Signature& sig = spec.env.sig_mut();
    auto standard = [&](const std::string& label, const std::string& tag) {
        ActionDef def;
        auto it = defined.find(label);
        if (it != defined.end()) {
            def = it->second;
            defined.erase(it);
        } else {
            def.label = label;
        }
        def.tag = tag;
        if (!sig.has(label)) sig.declare_label(label);
        spec.actions.push_back(def);
    };
    for (const auto& tag : spec.tags)
        for (const char* a : kTagActions) standard(std::string(a) + "_" + tag, tag);
    for (const char* a : kReaderActions) standard(a, "");
    if (!defined.empty()) config("action " + defined.begin()->first + " is not a standard interface call");
    for (const auto& a : spec.actions)
        for (const auto& n : a.fresh)
            if (!sig.is_name(n)) config("fresh name " + n + " of " + a.label + " is not declared with 'names'");
    if (!sig.has("to")) sig.declare_adversarial("to");
    if (!sig.has("g_guess")) sig.declare_adversarial("g_guess");
    return spec;
}

ProtocolSpec load_spec(const std::string& path) { return parse_spec(read_file(path)); }

StepResult action_step(const ProtocolSpec& spec, Env& env, const std::string& action, const MemoryState& sigma,
                       const Frame& phi, const std::map<std::string, std::string>& rename) {
    Effect e = effect_of(spec, env, action, sigma, phi, rename);
    return {e.term, apply_effect(sigma, e)};
}

StepResult fold(const ProtocolSpec& spec, Env& env, const std::vector<std::string>& actions, const MemoryState& sigma,
                const Frame& phi, const std::map<std::string, std::string>& rename) {
    Effect e = fold_effect(spec, env, actions, sigma, phi, rename);
    return {e.term, apply_effect(sigma, e)};
}

namespace {

GeneratedGoal generate(const ProtocolSpec& spec, std::size_t m, std::size_t p,
                       const std::function<std::vector<std::string>(std::size_t)>& actions_at, NameScheme scheme,
                       bool folded) {
    GeneratedGoal g;
    g.env = spec.env;
    MemoryState sl = spec.init, sr = spec.init;
    Frame fl, fr;
    std::map<std::string, std::size_t> uses;
    for (std::size_t i = 1; i <= m; ++i) {
        g.left_frames.push_back(fl);
        g.right_frames.push_back(fr);
        auto acts = actions_at(i);
        auto names = step_names(spec, acts, i, scheme, uses);
        Effect el = folded ? fold_effect(spec, g.env, acts, sl, fl, names)
                           : effect_of(spec, g.env, acts[0], sl, fl, names);
        Effect er = folded ? fold_effect(spec, g.env, acts, sr, fr, names)
                           : effect_of(spec, g.env, acts[0], sr, fr, names);
        if (i == p + 1) {
            sl = apply_effect(sl, el);  // the left swap is the identity
            sr = apply_effect(swapped(spec, sr), er);
        } else {
            sl = apply_effect(sl, el);
            sr = apply_effect(sr, er);
        }
        fl.push_back(el.term);
        fr.push_back(er.term);
    }
    g.left_frames.push_back(fl);
    g.right_frames.push_back(fr);
    g.goal.left = fl;
    g.goal.right = fr;
    g.goal.left.push_back(guess(g.env, fl));
    g.goal.right.push_back(guess(g.env, fr));
    g.goal.validate();
    g.comments.push_back("protocol " + (spec.name.empty() ? std::string("(unnamed)") : spec.name) + ", challenged tags " +
                         spec.challenged_left + " / " + spec.challenged_right + ", split after step " +
                         std::to_string(p));
    if (p < m)
        g.comments.push_back("the key swap at step " + std::to_string(p + 1) +
                             " reads the memory before that step's update and applies from step " +
                             std::to_string(p + 2) + " on");
    return g;
}

}  // namespace

GeneratedGoal gen_fixed_trace_goal(const ProtocolSpec& spec, const TraceSpec& trace, NameScheme scheme) {
    check_trace(spec, trace);
    GeneratedGoal g = generate(
        spec, trace.actions.size(), trace.p, [&](std::size_t i) { return std::vector<std::string>{trace.actions[i - 1]}; },
        scheme, false);
    std::string list;
    for (const auto& a : trace.actions) list += (list.empty() ? "" : ", ") + a;
    g.comments.insert(g.comments.begin() + 1, "trace: " + (list.empty() ? std::string("(empty)") : list));
    return g;
}

GeneratedGoal gen_bounded_goal(const ProtocolSpec& spec, std::size_t m, std::size_t p, NameScheme scheme) {
    if (p > m) config("split point exceeds the number of steps");
    auto first = spec.gamma(false), second = spec.gamma(true);
    GeneratedGoal g = generate(
        spec, m, p, [&](std::size_t i) { return i <= p ? first : second; }, scheme, true);
    g.comments.insert(g.comments.begin() + 1, "folded over all interface calls, " + std::to_string(m) + " step(s)");
    return g;
}

bool fold_matches_trace(const ProtocolSpec& spec, const TraceSpec& trace) {
    check_trace(spec, trace);
    std::size_t m = trace.actions.size();
    GeneratedGoal fixed = gen_fixed_trace_goal(spec, trace, NameScheme::StepIndexed);
    GeneratedGoal bounded = gen_bounded_goal(spec, m, trace.p, NameScheme::StepIndexed);
    const Signature& sig = bounded.env.sig();
    auto resolve = [&](const std::vector<Frame>& frames, const TermList& ts) {
        TermMap<Term> choice;
        for (std::size_t i = 0; i < m; ++i)
            choice.emplace(mk_term(sig.require("to"), frames[i]), mk_term(sig.require(trace.actions[i]), {}));
        TermMap<Term> memo;
        std::function<Term(const Term&)> go = [&](const Term& t) -> Term {
            if (auto it = choice.find(t); it != choice.end()) return it->second;
            if (!t.is_app() || t.arity() == 0) return t;
            if (auto it = memo.find(t); it != memo.end()) return it->second;
            TermList args;
            for (const auto& a : t.args()) args.push_back(go(a));
            Term r = rebuild(t, std::move(args));
            memo.emplace(t, r);
            return r;
        };
        TermList out;
        for (const auto& t : ts) out.push_back(nf(go(t)));
        return out;
    };
    TermList l = resolve(bounded.left_frames, bounded.goal.left);
    TermList r = resolve(bounded.right_frames, bounded.goal.right);
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i] != nf(fixed.goal.left[i])) return false;
        if (r[i] != nf(fixed.goal.right[i])) return false;
    }
    return l.size() == fixed.goal.size();
}

TraceSpec parse_trace(const std::string& csv, std::size_t p) {
    TraceSpec t;
    std::string item;
    std::istringstream is(csv);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) t.actions.push_back(item);
    }
    t.p = p;
    return t;
}

}  // namespace bcsa
