#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "repairqa/bitset.hpp"
#include "repairqa/core.hpp"
#include "repairqa/engine.hpp"

namespace repairqa {

enum class Comparison { Less, Greater, Equivalent, Incomparable };

// One of the five preference preorders, bound to a rule set. `Less`
// means strict preference of the right-hand side (S < S'), per the
// repair definition; Incomparable can only arise for the two inclusion
// kinds.
class PreferenceOrder {
public:
    PreferenceOrder(PreferenceSpec spec, const RuleSet& rules);

    const PreferenceSpec& spec() const { return spec_; }
    PrefKind kind() const { return spec_.kind; }
    std::size_t rule_count() const { return n_; }

    Comparison compare(const Bitset& s, const Bitset& s2) const;
    Comparison compare(const std::vector<std::string>& s,
                       const std::vector<std::string>& s2) const;

    std::int64_t total_weight(const Bitset& s) const;
    std::int64_t weight_of(std::size_t rule_index) const { return weight_[rule_index]; }
    // Rule indices per priority level, in level order; empty for
    // non-prioritized kinds.
    const std::vector<std::vector<std::size_t>>& levels() const { return levels_; }

    Bitset mask_of(const std::vector<std::string>& labels) const;
    std::vector<std::string> labels_of(const Bitset& mask) const;

private:
    PreferenceSpec spec_;
    const RuleSet* rules_;
    std::size_t n_;
    std::vector<std::vector<std::size_t>> levels_;
    std::vector<std::int64_t> weight_;
};

struct SearchConfig {
    // Guard for searches that enumerate subsets level by level: the
    // number of deletable rules must not exceed this.
    std::size_t max_subset_rules = 24;
    // Concurrent consistency checks within one BFS level.
    int jobs = 1;
    // Wall-clock budget for one search call.
    std::optional<std::chrono::milliseconds> budget;
    // Reference forces the subset-repairs-then-maxima algorithm.
    enum class Strategy { Auto, Reference } strategy = Strategy::Auto;
};

class SearchLimitError : public std::runtime_error {
public:
    explicit SearchLimitError(const std::string& what) : std::runtime_error(what) {}
};

class SearchTimeout : public std::runtime_error {
public:
    explicit SearchTimeout(const std::string& what) : std::runtime_error(what) {}
};

// Enumerates preferred rule repairs against one shared grounding, with
// consistency results memoized per rule subset.
class RepairSearch {
public:
    explicit RepairSearch(const GroundEngine& engine, SearchConfig cfg = SearchConfig());

    RepairSet subset_repairs();
    RepairSet preferred_repairs(const PreferenceSpec& pref);

    std::vector<Bitset> subset_repair_masks();
    std::vector<Bitset> preferred_repair_masks(const PreferenceOrder& order);

    std::size_t consistency_checks() const { return checks_; }

private:
    bool consistent(const Bitset& mask);
    void check_budget() const;

    // Top-down BFS over base u T for T within the deletable rules;
    // returns the maximal consistent masks. A level where every subset
    // is dominated or consistent closes the search.
    std::vector<Bitset> maximal_consistent(const Bitset& base,
                                           const std::vector<std::size_t>& deletable);

    std::vector<Bitset> cardinality_masks();
    std::vector<Bitset> weight_masks(const PreferenceOrder& order);
    std::vector<Bitset> prioritized_masks(const PreferenceOrder& order);
    std::vector<Bitset> maxima(std::vector<Bitset> masks, const PreferenceOrder& order) const;

    RepairSet finish(std::vector<Bitset> masks, PreferenceSpec pref);

    const GroundEngine& engine_;
    SearchConfig cfg_;
    std::size_t n_;
    std::unordered_map<Bitset, bool, BitsetHash> memo_;
    std::mutex memo_mutex_;
    std::size_t checks_ = 0;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
};

// One-shot conveniences; each builds its own grounding.
RepairSet subset_repairs(const Database& db, const RuleSet& rules,
                         const EngineConfig& ecfg = EngineConfig(),
                         const SearchConfig& scfg = SearchConfig());
RepairSet preferred_repairs(const Database& db, const RuleSet& rules, const PreferenceSpec& pref,
                            const EngineConfig& ecfg = EngineConfig(),
                            const SearchConfig& scfg = SearchConfig());

}  // namespace repairqa
