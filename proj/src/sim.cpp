#include "bcsa/sim.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bcsa {

HashImpl parse_hash_impl(const std::string& s) {
    if (s == "prf") return HashImpl::PRF;
    if (s == "leaky") return HashImpl::Leaky;
    if (s == "cr-only") return HashImpl::CROnly;
    throw Error(ErrorCode::ConfigError, "unknown hash implementation '" + s + "' (prf, leaky, cr-only)");
}

CombineImpl parse_combine_impl(const std::string& s) {
    if (s == "xor") return CombineImpl::Xor;
    if (s == "pair") return CombineImpl::Pair;
    throw Error(ErrorCode::ConfigError, "unknown combine implementation '" + s + "' (xor, pair)");
}

std::string hash_impl_name(HashImpl h) {
    switch (h) {
        case HashImpl::PRF: return "prf";
        case HashImpl::Leaky: return "leaky";
        case HashImpl::CROnly: return "cr-only";
    }
    return "?";
}

std::string combine_impl_name(CombineImpl c) { return c == CombineImpl::Xor ? "xor" : "pair"; }

Bits zeros(std::size_t n) { return Bits(n, 0); }

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
    Bits out(n);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return out;
}

Bits xor_bits(const Bits& a, const Bits& b) {
    Bits out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint8_t x = i < a.size() ? a[i] : 0;
        std::uint8_t y = i < b.size() ? b[i] : 0;
        out[i] = x ^ y;
    }
    return out;
}

Bits encode_pair(const Bits& a, const Bits& b) {
    if (a.size() > 0xFFFF) throw Error(ErrorCode::ConfigError, "pair component too long");
    Bits out;
    out.reserve(16 + a.size() + b.size());
    for (int i = 15; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((a.size() >> i) & 1u));
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Bits project(const Bits& x, int which) {
    if (x.size() < 16) return {};
    std::size_t len = 0;
    for (std::size_t i = 0; i < 16; ++i) len = (len << 1) | x[i];
    if (16 + len > x.size()) return {};
    auto mid = x.begin() + static_cast<long>(16 + len);
    return which == 1 ? Bits(x.begin() + 16, mid) : Bits(mid, x.end());
}

std::string to_hex(const Bits& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < b.size(); i += 4) {
        int v = 0;
        for (std::size_t j = 0; j < 4; ++j) v = (v << 1) | (i + j < b.size() ? b[i + j] : 0);
        out.push_back(digits[v]);
    }
    return out;
}

namespace {

Bits encode_args(const std::vector<Bits>& args) {
    if (args.empty()) return {};
    Bits out = args.back();
    for (std::size_t i = args.size() - 1; i-- > 0;) out = encode_pair(args[i], out);
    return out;
}

}  // namespace

Evaluator::Evaluator(PrimitiveSuite suite, std::uint64_t seed) : suite_(suite), rng_(seed) {}

void Evaluator::bind_name(const std::string& name, Bits value) {
    names_[name] = std::move(value);
    memo_.clear();
}

void Evaluator::bind_adversary(const std::string& symbol, AdvProc proc) {
    adversary_[symbol] = std::move(proc);
    memo_.clear();
}

Bits Evaluator::value_of_name(const std::string& id, bool constant) {
    auto& table = constant ? constants_ : names_;
    auto it = table.find(id);
    if (it != table.end()) return it->second;
    if (!constant && !sample_names_) throw Error(ErrorCode::UnboundName, "no value for name " + id);
    return table[id] = random_bits(rng_, suite_.eta);
}

Bits Evaluator::hash(const Bits& msg, const Bits& key) {
    auto [it, fresh] = hash_table_.try_emplace({key, msg});
    if (fresh) it->second = random_bits(rng_, suite_.eta);
    Bits out = it->second;
    switch (suite_.hash) {
        case HashImpl::PRF: break;
        case HashImpl::Leaky:
            out.insert(out.begin(), key.empty() ? 0 : key[0]);
            out.pop_back();
            break;
        case HashImpl::CROnly:
            if (!out.empty()) out[0] = msg.empty() ? 0 : msg[0];
            break;
    }
    return out;
}

Bits Evaluator::oracle(const std::string& symbol, const Bits& input) {
    auto [it, fresh] = oracle_table_.try_emplace({symbol, input});
    if (fresh) it->second = random_bits(rng_, suite_.eta);
    Bits out = it->second;
    // an unkeyed function has no key argument: the secret it leaks is the last block of its input
    switch (suite_.hash) {
        case HashImpl::PRF: break;
        case HashImpl::Leaky:
            out.insert(out.begin(), input.size() >= suite_.eta ? input[input.size() - suite_.eta] : 0);
            out.pop_back();
            break;
        case HashImpl::CROnly:
            if (!out.empty()) out[0] = input.empty() ? 0 : input[0];
            break;
    }
    return out;
}

Bits Evaluator::combine(const Bits& a, const Bits& b) {
    return suite_.combine == CombineImpl::Xor ? xor_bits(a, b) : encode_pair(a, b);
}

Bits Evaluator::eval(const Term& t) {
    auto it = memo_.find(t);
    if (it != memo_.end()) return it->second;
    Bits v = eval_uncached(t);
    memo_.emplace(t, v);
    return v;
}

Bits Evaluator::eval_uncached(const Term& t) {
    if (t.is_name()) return value_of_name(t.id(), false);
    if (t.is_metavar()) throw Error(ErrorCode::ConfigError, "cannot evaluate a pattern variable");
    const std::string& h = t.head();
    auto arg = [&](std::size_t i) { return eval(t.arg(i)); };
    if (h == "0") return zeros(suite_.eta);
    if (h == "true") return {1};
    if (h == "false") return {0};
    if (h == "pair") return encode_pair(arg(0), arg(1));
    if (h == "pi1") return project(arg(0), 1);
    if (h == "pi2") return project(arg(0), 2);
    if (h == "EQ") return {static_cast<std::uint8_t>(arg(0) == arg(1))};
    if (h == "xor") return xor_bits(arg(0), arg(1));
    if (h == "ite") return arg(0) == Bits{1} ? arg(1) : arg(2);
    if (h == "hash") return hash(arg(0), arg(1));
    if (h == "combine") return combine(arg(0), arg(1));
    if (h == "init") return arg(0);
    if (h == "G") {
        Bits s = arg(0);
        auto [o, fo] = oracle_table_.try_emplace({"G.out", s});
        if (fo) o->second = random_bits(rng_, suite_.eta);
        auto [n, fn] = oracle_table_.try_emplace({"G.next", s});
        if (fn) n->second = random_bits(rng_, suite_.eta);
        return encode_pair(o->second, n->second);
    }
    if (h == "pi_o") return project(arg(0), 1);
    if (h == "pi_S") return project(arg(0), 2);

    std::vector<Bits> args;
    for (std::size_t i = 0; i < t.arity(); ++i) args.push_back(arg(i));
    if (t.symbol()->kind == SymKind::Adversarial) {
        auto a = adversary_.find(h);
        if (a == adversary_.end()) a = adversary_.find("*");
        if (a == adversary_.end()) throw Error(ErrorCode::UnboundSymbol, "no procedure for adversarial symbol " + h);
        return a->second(args);
    }
    if (args.empty()) return value_of_name(h, true);
    return oracle(h, encode_args(args));
}

Bits eval_term(const Term& t, const PrimitiveSuite& suite, const std::map<std::string, Bits>& name_env,
               const std::map<std::string, AdvProc>& adv_env, std::uint64_t seed) {
    Evaluator ev(suite, seed);
    for (const auto& [n, v] : name_env) ev.bind_name(n, v);
    for (const auto& [n, p] : adv_env) ev.bind_adversary(n, p);
    return ev.eval(t);
}

// ---------------------------------------------------------------------------------------------

namespace {

std::string fixed4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag, std::size_t world, std::size_t trial) {
    std::vector<std::uint32_t> material{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                        static_cast<std::uint32_t>(world), static_cast<std::uint32_t>(trial)};
    for (char c : tag) material.push_back(static_cast<std::uint8_t>(c));
    std::seed_seq seq(material.begin(), material.end());
    std::mt19937_64 gen(seq);
    return gen();
}

// Wald interval of the difference of two proportions
double difference_ci(std::size_t s0, std::size_t s1, std::size_t trials) {
    if (trials == 0) return 0;
    double n = static_cast<double>(trials);
    double p0 = static_cast<double>(s0) / n, p1 = static_cast<double>(s1) / n;
    return 1.96 * std::sqrt((p0 * (1 - p0) + p1 * (1 - p1)) / n);
}

double single_ci(std::size_t s, std::size_t trials) {
    if (trials == 0) return 0;
    double p = static_cast<double>(s) / static_cast<double>(trials);
    return 1.96 * std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

struct AttackDef {
    std::string id;
    std::vector<std::string> protocols;  // first is the default
    std::string trace;
    std::size_t p;
    bool single_world;
    // procedure for the adversarial symbol g (and any other symbol, via "*")
    std::function<Bits(const std::vector<Bits>&, std::size_t eta)> g;
    // the guess (or the acceptance event) on the concrete frame
    std::function<bool(Evaluator&, const std::vector<Bits>&, const ProtocolSpec&)> decide;
    std::vector<std::pair<std::string, std::string>> notes;
    // symbols answered separately from g
    std::map<std::string, std::function<Bits(const std::vector<Bits>&, std::size_t eta)>> split = {};
};

Bits nothing(const std::vector<Bits>&, std::size_t eta) { return zeros(eta); }

// the reader accepted when its last message is not the reject value 0
bool reader_accepts(Evaluator& ev, const std::vector<Bits>& frame, const ProtocolSpec&) {
    return frame.back() != zeros(ev.suite().eta);
}

// forward the reader nonce to the tag, then answer the reader with the replayed tag hash and
// the nonce that makes the combined message repeat: n_R (+) n_T (+) n_R'
Bits replay(const std::vector<Bits>& phi, std::size_t eta) {
    if (phi.size() == 1) return phi[0];
    if (phi.size() == 3) {
        Bits nt = project(phi[1], 1);
        return encode_pair(xor_bits(xor_bits(phi[0], nt), phi[2]), project(phi[1], 2));
    }
    return zeros(eta);
}

// the same replay for a reader that reads its two halves from separate nonce symbols
Bits replay_nonce(const std::vector<Bits>& phi, std::size_t eta) {
    Bits r = replay(phi, eta);
    return phi.size() == 3 ? project(r, 1) : r;
}
Bits replay_hash(const std::vector<Bits>& phi, std::size_t eta) { return project(replay(phi, eta), 2); }

const std::vector<AttackDef>& attack_table() {
    static const std::vector<AttackDef> table = {
        {"kcl-xor",
         {"kcl", "kclp"},
         "TagMsg_A, TagMsg_A",
         0,
         false,
         nothing,
         // Same challenge twice. The xor of the four answer components is zero exactly when both
         // sessions belong to one tag. Under cr-only the first bit of each hash copies the first
         // message bit, so comp1 (+) comp2 reveals the first identity bit of each session.
         [](Evaluator& ev, const std::vector<Bits>& phi, const ProtocolSpec& spec) {
             Bits c0 = xor_bits(project(phi[0], 1), project(phi[0], 2));
             Bits c1 = xor_bits(project(phi[1], 1), project(phi[1], 2));
             if (c0.empty() || c1.empty()) return false;
             if (ev.suite().hash == HashImpl::CROnly) {
                 Bits a = ev.eval(parse_term(spec.challenged_left, spec.env));
                 return c1[0] == a[0];
             }
             return xor_bits(c0, c1) == zeros(ev.suite().eta);
         },
         {}},
        {"lak-auth-forge",
         {"lak"},
         "ReaderInit, TagMsg_A, ReaderInit, ReaderMsg",
         4,
         true,
         replay,
         reader_accepts,
         {},
         {{"g_c", replay_nonce}, {"g_h", replay_hash}}},
        {"lak-leak",
         {"lak_stateless"},
         "TagMsg_A, TagMsg_A",
         0,
         false,
         nothing,
         // the first bit of each hash is a key bit under the leaky suite
         [](Evaluator&, const std::vector<Bits>& phi, const ProtocolSpec&) {
             Bits h0 = project(phi[0], 2), h1 = project(phi[1], 2);
             return !h0.empty() && !h1.empty() && h0[0] == h1[0];
         },
         {}},
        {"lakp-combine-replay",
         {"lakp"},
         "ReaderInit, TagMsg_A, ReaderInit, ReaderMsg",
         4,
         true,
         replay,
         reader_accepts,
         {{"witness", "corrected"}, {"witness_term", "n_R (+) n_T (+) n_R'"}}},
        {"lakp-combine-link",
         {"lakp"},
         "TagMsg_A, TagMsg_A",
         0,
         false,
         // g1 = 0 first, then s(n_T) = n_T
         [](const std::vector<Bits>& phi, std::size_t eta) {
             return phi.empty() ? zeros(eta) : project(phi[0], 1);
         },
         [](Evaluator&, const std::vector<Bits>& phi, const ProtocolSpec&) {
             return project(phi[0], 2) == project(phi[1], 2);
         },
         {{"g1", "0"}, {"s", "identity"}}},
        {"lakp-replay-link",
         {"lakp"},
         "ReaderInit, TagMsg_A, ReaderInit, ReaderMsg",
         2,
         false,
         replay,
         reader_accepts,
         {{"witness", "corrected"}}},
    };
    return table;
}

const AttackDef& find_attack(const std::string& id) {
    for (const auto& a : attack_table())
        if (a.id == id) return a;
    throw Error(ErrorCode::ConfigError, "unknown attack '" + id + "'");
}

TermList frame_terms(const TermList& side) {
    TermList out = side;
    if (!out.empty() && out.back().is_app("g_guess")) out.pop_back();
    return out;
}

}  // namespace

std::string AdvantageEstimate::report() const {
    std::ostringstream os;
    os << "attack=" << attack << "\n"
       << "protocol=" << protocol << "\n"
       << "hash=" << hash_impl_name(suite.hash) << "\n"
       << "combine=" << combine_impl_name(suite.combine) << "\n"
       << "eta=" << suite.eta << "\n"
       << "trials=" << trials << "\n"
       << "seed=" << seed << "\n"
       << "mode=" << (single_world ? "acceptance" : "two-world") << "\n"
       << "successes_world0=" << successes_world0 << "\n";
    if (!single_world) os << "successes_world1=" << successes_world1 << "\n";
    os << "advantage=" << fixed4(advantage) << "\n"
       << "ci95=" << fixed4(ci95) << "\n";
    for (const auto& [k, v] : notes) os << k << "=" << v << "\n";
    return os.str();
}

std::string AdvantageEstimate::json() const {
    nlohmann::ordered_json j;
    j["attack"] = attack;
    j["protocol"] = protocol;
    j["hash"] = hash_impl_name(suite.hash);
    j["combine"] = combine_impl_name(suite.combine);
    j["eta"] = suite.eta;
    j["trials"] = trials;
    j["seed"] = seed;
    j["mode"] = single_world ? "acceptance" : "two-world";
    j["successes_world0"] = successes_world0;
    if (!single_world) j["successes_world1"] = successes_world1;
    j["advantage"] = advantage;
    j["ci95"] = ci95;
    for (const auto& [k, v] : notes) j["notes"][k] = v;
    return j.dump(2);
}

const std::vector<std::string>& attack_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& a : attack_table()) out.push_back(a.id);
        return out;
    }();
    return ids;
}

std::string attack_protocol(const std::string& attack) { return find_attack(attack).protocols.front(); }

std::vector<std::string> attack_protocols(const std::string& attack) { return find_attack(attack).protocols; }

AdvantageEstimate run_attack(const std::string& attack, const ProtocolSpec& spec, const PrimitiveSuite& suite,
                             std::size_t trials, std::uint64_t seed) {
    const AttackDef& def = find_attack(attack);
    if (std::find(def.protocols.begin(), def.protocols.end(), spec.name) == def.protocols.end())
        throw Error(ErrorCode::IncompatibleSuite, "attack " + attack + " does not run against protocol " + spec.name);
    if (suite.eta < 8) throw Error(ErrorCode::IncompatibleSuite, "eta must be at least 8");
    auto generated = gen_fixed_trace_goal(spec, parse_trace(def.trace, def.p));
    const TermList sides[2] = {frame_terms(generated.goal.left), frame_terms(generated.goal.right)};

    AdvantageEstimate est;
    est.attack = attack;
    est.protocol = spec.name;
    est.suite = suite;
    est.trials = trials;
    est.seed = seed;
    est.single_world = def.single_world;
    est.notes = def.notes;
    std::size_t worlds = def.single_world ? 1 : 2;
    std::size_t wins[2] = {0, 0};
    for (std::size_t w = 0; w < worlds; ++w) {
        for (std::size_t trial = 0; trial < trials; ++trial) {
            Evaluator ev(suite, derive_seed(seed, attack, w, trial));
            ev.set_sample_names(true);
            std::size_t eta = suite.eta;
            auto g = def.g;
            ev.bind_adversary("*", [g, eta](const std::vector<Bits>& args) { return g(args, eta); });
            for (const auto& [sym, proc] : def.split)
                ev.bind_adversary(sym, [proc, eta](const std::vector<Bits>& args) { return proc(args, eta); });
            std::vector<Bits> frame;
            for (const auto& t : sides[w]) frame.push_back(ev.eval(t));
            if (def.decide(ev, frame, spec)) ++wins[w];
        }
    }
    est.successes_world0 = wins[0];
    est.successes_world1 = wins[1];
    double t = trials ? static_cast<double>(trials) : 1.0;
    if (def.single_world) {
        est.advantage = static_cast<double>(wins[0]) / t;
        est.ci95 = single_ci(wins[0], trials);
    } else {
        est.advantage = std::fabs(static_cast<double>(wins[0]) - static_cast<double>(wins[1])) / t;
        est.ci95 = difference_ci(wins[0], wins[1], trials);
    }
    return est;
}

Transcript run_protocol_trace(const ProtocolSpec& spec, const TraceSpec& trace, const PrimitiveSuite& suite,
                              std::uint64_t seed, const std::map<std::string, AdvProc>& adversary) {
    auto generated = gen_fixed_trace_goal(spec, trace);
    Evaluator ev(suite, seed);
    ev.set_sample_names(true);
    std::size_t eta = suite.eta;
    ev.bind_adversary("*", [eta](const std::vector<Bits>& phi) { return phi.empty() ? zeros(eta) : phi.back(); });
    for (const auto& [n, p] : adversary) ev.bind_adversary(n, p);
    Transcript out;
    for (const auto& t : frame_terms(generated.goal.left)) out.messages.push_back(ev.eval(t));
    return out;
}

Cprng::Cprng(std::size_t eta, const Bits& seed) : eta_(eta), state_(seed) {
    if (seed.size() != eta) throw Error(ErrorCode::ConfigError, "the seed must have eta bits");
}

// G(s) expands the state through a seeded generator; the output and the next state are
// disjoint parts of the expansion, so both are deterministic in s
Bits Cprng::next() {
    std::vector<std::uint32_t> words{0x47u, static_cast<std::uint32_t>(eta_)};
    for (std::size_t i = 0; i < state_.size(); i += 32) {
        std::uint32_t w = 0;
        for (std::size_t j = 0; j < 32 && i + j < state_.size(); ++j) w |= static_cast<std::uint32_t>(state_[i + j]) << j;
        words.push_back(w);
    }
    std::seed_seq seq(words.begin(), words.end());
    std::mt19937_64 gen(seq);
    Bits out = random_bits(gen, eta_);
    state_ = random_bits(gen, eta_);
    return out;
}

AdvantageEstimate axiom_harness(const Goal& goal, const PrimitiveSuite& suite, std::size_t trials,
                                std::uint64_t seed) {
    const std::size_t k = goal.size();
    const std::size_t bits = 8;
    // statistics: per element bit frequency (first `bits` bits), per element "is zero", per pair equality
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t b = 0; b < bits; ++b) names.push_back("u" + std::to_string(i + 1) + ".bit" + std::to_string(b));
        names.push_back("u" + std::to_string(i + 1) + ".zero");
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            names.push_back("u" + std::to_string(i + 1) + "=u" + std::to_string(j + 1));
    std::vector<std::size_t> counts[2] = {std::vector<std::size_t>(names.size()), std::vector<std::size_t>(names.size())};

    for (std::size_t w = 0; w < 2; ++w) {
        const TermList& side = w == 0 ? goal.left : goal.right;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            Evaluator ev(suite, derive_seed(seed, "axiom", w, trial));
            ev.set_sample_names(true);
            ev.bind_adversary("*", [](const std::vector<Bits>& args) { return encode_args(args); });
            std::vector<Bits> vals;
            for (const auto& t : side) vals.push_back(ev.eval(t));
            std::size_t s = 0;
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t b = 0; b < bits; ++b, ++s)
                    if (b < vals[i].size() && vals[i][b]) ++counts[w][s];
                if (std::all_of(vals[i].begin(), vals[i].end(), [](std::uint8_t x) { return x == 0; })) ++counts[w][s];
                ++s;
            }
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j, ++s)
                    if (vals[i] == vals[j]) ++counts[w][s];
        }
    }
    AdvantageEstimate est;
    est.attack = "axiom";
    est.protocol = "-";
    est.suite = suite;
    est.trials = trials;
    est.seed = seed;
    std::size_t best = 0;
    double best_adv = -1;
    for (std::size_t s = 0; s < names.size(); ++s) {
        double adv = std::fabs(static_cast<double>(counts[0][s]) - static_cast<double>(counts[1][s])) /
                     static_cast<double>(trials ? trials : 1);
        if (adv > best_adv) {
            best_adv = adv;
            best = s;
        }
    }
    if (!names.empty()) {
        est.successes_world0 = counts[0][best];
        est.successes_world1 = counts[1][best];
        est.advantage = best_adv;
        est.ci95 = difference_ci(counts[0][best], counts[1][best], trials);
        est.notes.push_back({"statistic", names[best]});
    }
    est.notes.push_back({"statistics", std::to_string(names.size())});
    return est;
}

}  // namespace bcsa
