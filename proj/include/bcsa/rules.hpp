#pragma once

#include "bcsa/goal.hpp"
#include "bcsa/syntax.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bcsa {

enum class RuleKind {
    Refl,
    Sym,
    Trans,
    Dup,
    Congr,
    Perm,
    FA,
    IfThen,
    CS,
    Indep,
    EqIndep,
    FreshNonce,
    CR,
    PRF,
    PRNG,
    PRNG_FS,
    CombineInjL,
    CombineInjR,
    Absurd,
};

std::string_view rule_name(RuleKind k);
std::optional<RuleKind> parse_rule_kind(std::string_view s);  // case-insensitive
const std::vector<RuleKind>& all_rule_kinds();

// Parameter value in a proof script: 3, k_A, "term text", [v, ...]
struct Value {
    enum class Kind { Int, Ident, Str, List };
    Kind kind = Kind::Int;
    long long num = 0;
    std::string text;
    std::vector<Value> items;
    SrcPos pos;

    static Value integer(long long v) { Value x; x.kind = Kind::Int; x.num = v; return x; }
    static Value ident(std::string s) { Value x; x.kind = Kind::Ident; x.text = std::move(s); return x; }
    static Value str(std::string s) { Value x; x.kind = Kind::Str; x.text = std::move(s); return x; }
    static Value list(std::vector<Value> v) { Value x; x.kind = Kind::List; x.items = std::move(v); return x; }
};

std::string print_value(const Value& v);

struct RuleInstance {
    RuleKind kind = RuleKind::Refl;
    std::map<std::string, Value> params;
    SrcPos pos;

    RuleInstance& set(const std::string& key, Value v) {
        params[key] = std::move(v);
        return *this;
    }
};

struct Violation {
    std::string condition;
    std::string offending;  // printed subterm, may be empty
};

struct SideConditionReport {
    bool passed = true;
    ErrorCode code = ErrorCode::SideConditionViolation;
    std::vector<Violation> violations;
    std::string describe() const;
};

class RuleError : public Error {
public:
    RuleError(ErrorCode code, Violation v);
    const SideConditionReport& report() const { return report_; }

private:
    SideConditionReport report_;
};

// Premise subgoals of `inst` applied backwards to `goal`. Term-valued parameters are parsed
// in `scope`, extended with @L<i> / @R<i> (1-based goal elements) and @L / @R (whole sides).
std::vector<Goal> apply_rule(const RuleInstance& inst, const Goal& goal, const Scope& scope);
SideConditionReport check_side_conditions(const RuleInstance& inst, const Goal& goal, const Scope& scope);

std::string pretty_rule(const RuleInstance& inst, const Goal* goal = nullptr);

}  // namespace bcsa
