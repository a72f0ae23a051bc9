#include "repairqa/query_eval.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "repairqa/analysis.hpp"

namespace repairqa {

bool check_safe(const Query& q) {
    std::set<std::string> pos_vars;
    for (const Atom& a : q.pos()) {
        auto vars = a.variables();
        pos_vars.insert(vars.begin(), vars.end());
    }
    for (const Atom& a : q.neg())
        for (const std::string& v : a.variables())
            if (!pos_vars.count(v)) return false;
    return true;
}

bool check_covered(const Query& q) {
    for (const Atom& neg : q.neg()) {
        std::set<Term> need(neg.args().begin(), neg.args().end());
        bool covered = false;
        for (const Atom& pos : q.pos()) {
            std::set<Term> have(pos.args().begin(), pos.args().end());
            if (std::includes(have.begin(), have.end(), need.begin(), need.end())) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

namespace {

bool match_positive(const Instance& m,
                    const std::map<std::string, std::vector<const Atom*>>& by_pred,
                    const Query& q, std::size_t i, Binding& binding) {
    if (i == q.pos().size()) {
        for (const Atom& neg : q.neg()) {
            Atom ground = apply_substitution(neg, binding, true);
            if (m.contains(ground)) return false;
        }
        return true;
    }
    const Atom& pattern = q.pos()[i];
    auto it = by_pred.find(pattern.predicate());
    if (it == by_pred.end()) return false;
    for (const Atom* candidate : it->second) {
        auto extended = match_atom(pattern, *candidate, binding);
        if (!extended) continue;
        if (match_positive(m, by_pred, q, i + 1, *extended)) return true;
    }
    return false;
}

}  // namespace

bool holds_in_model(const Instance& m, const Query& q) {
    if (!check_safe(q))
        throw UnsafeQueryError("unsafe query: a negated atom uses a variable with no positive "
                               "occurrence");
    std::map<std::string, std::vector<const Atom*>> by_pred;
    for (const Atom& a : m) by_pred[a.predicate()].push_back(&a);
    Binding empty;
    return match_positive(m, by_pred, q, 0, empty);
}

EntailResult entails_s(const Database& db, const RuleSet& rules, const Query& q,
                       const EngineConfig& cfg) {
    GroundEngine engine(db, rules, cfg);
    return entails_s(engine, Bitset::full(rules.size()), q);
}

EntailResult entails_s(const GroundEngine& engine, const Bitset& active, const Query& q) {
    std::vector<Instance> models = engine.stable_models(active);
    if (models.empty()) return {true, true};  // "for each stable model", vacuously
    for (const Instance& m : models)
        if (!holds_in_model(m, q)) return {false, false};
    return {true, false};
}

Verdict certain_answer(const Database& db, const RuleSet& rules, const PreferenceSpec& pref,
                       const Query& q, const CertainConfig& cfg) {
    if (!check_safe(q))
        throw UnsafeQueryError("unsafe query: a negated atom uses a variable with no positive "
                               "occurrence");

    Verdict verdict;

    bool stratified = predicate_stratify(rules).has_value();
    if (!stratified && is_guarded(rules) && !check_covered(q)) {
        if (cfg.strict_classes)
            throw CoverednessError(
                "query is not covered; the guarded-with-full-negation class requires covered "
                "queries (strict-classes)");
        verdict.warnings.push_back(
            "query is not covered; guarantees for guarded rule sets with full negation assume "
            "covered queries");
    }
    if (!is_r_acyclic(rules))
        verdict.warnings.push_back(
            "rule set is not R-acyclic; grounding termination is not guaranteed");

    GroundEngine engine(db, rules, cfg.engine);
    RepairSearch search(engine, cfg.search);
    PreferenceOrder order(pref, rules);
    std::vector<Bitset> masks = search.preferred_repair_masks(order);

    // Repairs in lexicographic label order; the first failing one is
    // reported.
    std::vector<std::vector<std::size_t>> keys;
    keys.reserve(masks.size());
    for (const Bitset& m : masks) keys.push_back(m.set_bits());
    std::vector<std::size_t> idx(masks.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    verdict.repairs_examined = 0;
    for (std::size_t i : idx) {
        ++verdict.repairs_examined;
        std::vector<Instance> models = engine.stable_models(masks[i]);
        for (const Instance& m : models) {
            if (!holds_in_model(m, q)) {
                std::vector<std::string> labels;
                for (std::size_t bit : keys[i]) labels.push_back(rules.at(bit).label());
                verdict.entailed = false;
                verdict.countermodel =
                    Countermodel{std::move(labels), m, "query does not hold in this stable model"};
                return verdict;
            }
        }
    }
    verdict.entailed = true;
    return verdict;
}

}  // namespace repairqa
