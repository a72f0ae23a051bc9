#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repairqa/core.hpp"
#include "repairqa/engine.hpp"
#include "repairqa/repair.hpp"

namespace repairqa {

class UnsafeQueryError : public DomainError {
public:
    explicit UnsafeQueryError(const std::string& what) : DomainError(what) {}
};

class CoverednessError : public DomainError {
public:
    explicit CoverednessError(const std::string& what) : DomainError(what) {}
};

// Safe: every variable of a negated atom also occurs positively.
// Covered: some positive atom carries all arguments of each negated one.
bool check_safe(const Query& q);
bool check_covered(const Query& q);

// Some assignment h of the query's variables into m satisfies
// h(Q+) <= m and h(Q-) n m = 0. The query must be safe.
bool holds_in_model(const Instance& m, const Query& q);

struct EntailResult {
    bool entailed;
    bool vacuous;  // D u S had no stable model; true over an empty set
};

// Entailment in every stable model of D u S.
EntailResult entails_s(const Database& db, const RuleSet& rules, const Query& q,
                       const EngineConfig& cfg = EngineConfig());
EntailResult entails_s(const GroundEngine& engine, const Bitset& active, const Query& q);

struct Countermodel {
    std::vector<std::string> repair;
    Instance model;
    std::string reason;
};

struct Verdict {
    bool entailed = false;
    std::size_t repairs_examined = 0;
    std::optional<Countermodel> countermodel;  // present iff not entailed
    std::vector<std::string> warnings;
};

struct CertainConfig {
    EngineConfig engine;
    SearchConfig search;
    // Reject non-covered queries over guarded rule sets with full
    // negation instead of warning.
    bool strict_classes = false;
};

// Certain answering over all preferred repairs: entailed iff the query
// holds in every stable model of every repair. Stops at the first
// failing repair (in repair order) and reports it as a countermodel.
Verdict certain_answer(const Database& db, const RuleSet& rules, const PreferenceSpec& pref,
                       const Query& q, const CertainConfig& cfg = CertainConfig());

}  // namespace repairqa
