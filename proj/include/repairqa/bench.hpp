#pragma once

#include <string>
#include <vector>

#include "repairqa/core.hpp"
#include "repairqa/engine.hpp"
#include "repairqa/repair.hpp"

namespace repairqa {

// Synthetic instance family: a reliable core of layered, R-acyclic,
// stratified rule chains over generated facts, plus a few unreliable
// lowest-priority constraints (with default negation) that make the
// full set inconsistent. Named dXtY: X thousand facts, Y unreliable
// rules.
struct BenchSpec {
    std::size_t facts = 10000;
    std::size_t reliable_rules = 120;  // rounded down to a multiple of 4
    std::size_t unreliable_rules = 3;
};

struct BenchInstance {
    std::string name;
    Database db;
    RuleSet rules;
    PreferenceSpec prio_subset;
    PreferenceSpec prio_cardinality;
    PreferenceSpec weight;
    std::size_t negation_count = 0;
};

BenchInstance make_bench_instance(const BenchSpec& spec);

struct StrategyTiming {
    std::string strategy;
    double seconds = 0;
    bool completed = false;
    std::size_t repairs = 0;
    std::size_t consistency_checks = 0;
};

struct BenchResult {
    std::string instance;
    std::size_t facts = 0;
    std::size_t rules = 0;
    std::size_t negs = 0;
    double ground_seconds = 0;
    std::vector<StrategyTiming> timings;
    // The prioritized and weight strategies finished faster than plain
    // subset search (which may have exhausted its budget).
    bool relative_speed_ok = false;
};

// Runs prio-subset, weight, and plain subset repair search on one
// instance; the plain subset search gets `subset_budget_seconds` of
// wall clock before it is cut off.
BenchResult run_bench(const BenchInstance& instance, const EngineConfig& ecfg,
                      SearchConfig scfg, double subset_budget_seconds);

std::string bench_table(const std::vector<BenchResult>& results);

}  // namespace repairqa
