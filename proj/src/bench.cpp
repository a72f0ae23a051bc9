#include "repairqa/bench.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

namespace repairqa {

BenchInstance make_bench_instance(const BenchSpec& spec) {
    const std::size_t groups = std::max<std::size_t>(1, spec.reliable_rules / 4);

    auto var_x = Term::variable("x");
    auto var_y = Term::variable("y");
    auto pred = [](const char* stem, std::size_t g) {
        return std::string(stem) + std::to_string(g);
    };

    std::vector<Rule> rules;
    std::vector<std::string> reliable_labels, unreliable_labels;

    // Per group g: Base -> Mid -> exists Rel/Site -> Derived -> Top.
    for (std::size_t g = 0; g < groups; ++g) {
        auto label = [&](std::size_t i) {
            return "r" + std::to_string(g * 4 + i + 1);
        };
        rules.emplace_back(label(0), AtomList{Atom(pred("base", g), {var_x})}, AtomList{},
                           AtomList{Atom(pred("mid", g), {var_x})}, std::vector<std::string>{});
        rules.emplace_back(label(1), AtomList{Atom(pred("mid", g), {var_x})}, AtomList{},
                           AtomList{Atom(pred("rel", g), {var_x, var_y}),
                                    Atom(pred("site", g), {var_y})},
                           std::vector<std::string>{"y"});
        rules.emplace_back(label(2),
                           AtomList{Atom(pred("rel", g), {var_x, var_y}),
                                    Atom(pred("site", g), {var_y})},
                           AtomList{}, AtomList{Atom(pred("derived", g), {var_x})},
                           std::vector<std::string>{});
        rules.emplace_back(label(3), AtomList{Atom(pred("derived", g), {var_x})}, AtomList{},
                           AtomList{Atom(pred("top", g), {var_x})}, std::vector<std::string>{});
        for (std::size_t i = 0; i < 4; ++i) reliable_labels.push_back(label(i));
    }

    // Unreliable constraints against the first groups; each one alone
    // makes the data inconsistent and carries a default negation.
    std::size_t negs = 0;
    for (std::size_t k = 0; k < spec.unreliable_rules; ++k) {
        std::size_t g = k % groups;
        std::string label = "u" + std::to_string(k + 1);
        rules.emplace_back(label,
                           AtomList{Atom(pred("top", g), {var_x})},
                           AtomList{Atom(pred("exempt", g), {var_x})},
                           AtomList{Atom::falsum()}, std::vector<std::string>{});
        ++negs;
        unreliable_labels.push_back(label);
    }

    AtomList facts;
    facts.reserve(spec.facts);
    for (std::size_t i = 0; i < spec.facts; ++i) {
        std::size_t g = i % groups;
        facts.emplace_back(pred("base", g), TermList{Term::constant("n" + std::to_string(i))});
    }

    BenchInstance out;
    out.name = "d" + std::to_string(spec.facts / 1000) + "t" +
               std::to_string(spec.unreliable_rules);
    out.db = Database(std::move(facts));
    out.rules = RuleSet(std::move(rules));
    out.negation_count = negs;

    out.prio_subset.kind = PrefKind::PrioSubset;
    out.prio_subset.priority_levels = {reliable_labels, unreliable_labels};
    out.prio_cardinality = out.prio_subset;
    out.prio_cardinality.kind = PrefKind::PrioCardinality;

    out.weight.kind = PrefKind::Weight;
    for (const std::string& l : reliable_labels) out.weight.weights[l] = 10;
    std::int64_t w = 1;
    for (const std::string& l : unreliable_labels) out.weight.weights[l] = w++;
    return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

StrategyTiming time_strategy(const GroundEngine& engine, const SearchConfig& scfg,
                             const std::string& name, const PreferenceSpec* pref) {
    StrategyTiming t;
    t.strategy = name;
    RepairSearch search(engine, scfg);
    auto start = std::chrono::steady_clock::now();
    try {
        RepairSet repairs = pref ? search.preferred_repairs(*pref) : search.subset_repairs();
        t.completed = true;
        t.repairs = repairs.repairs.size();
    } catch (const SearchTimeout&) {
        t.completed = false;
    }
    t.seconds = seconds_since(start);
    t.consistency_checks = search.consistency_checks();
    return t;
}

}  // namespace

BenchResult run_bench(const BenchInstance& instance, const EngineConfig& ecfg, SearchConfig scfg,
                      double subset_budget_seconds) {
    BenchResult result;
    result.instance = instance.name;
    result.facts = instance.db.size();
    result.rules = instance.rules.size();
    result.negs = instance.negation_count;

    auto start = std::chrono::steady_clock::now();
    GroundEngine engine(instance.db, instance.rules, ecfg);
    result.ground_seconds = seconds_since(start);

    // The level-by-level searches need the guard open for large rule
    // sets; the budget is the effective cut-off.
    SearchConfig wide = scfg;
    wide.max_subset_rules = std::max(wide.max_subset_rules, instance.rules.size());

    result.timings.push_back(
        time_strategy(engine, wide, "prio-subset", &instance.prio_subset));
    result.timings.push_back(time_strategy(engine, wide, "weight", &instance.weight));

    SearchConfig budgeted = wide;
    budgeted.budget = std::chrono::milliseconds(
        static_cast<std::int64_t>(subset_budget_seconds * 1000));
    result.timings.push_back(time_strategy(engine, budgeted, "subset", nullptr));

    double fast = 0;
    for (const auto& t : result.timings)
        if (t.strategy != "subset") fast = std::max(fast, t.seconds);
    const StrategyTiming& subset = result.timings.back();
    result.relative_speed_ok =
        (!subset.completed && subset.seconds >= fast) || (subset.completed && subset.seconds > fast);
    return result;
}

std::string bench_table(const std::vector<BenchResult>& results) {
    std::ostringstream os;
    os << std::left << std::setw(10) << "instance" << std::right << std::setw(9) << "#facts"
       << std::setw(8) << "#rules" << std::setw(7) << "#negs" << std::setw(10) << "ground";
    if (!results.empty())
        for (const auto& t : results.front().timings)
            os << std::setw(14) << ("t_" + t.strategy);
    os << "\n";
    for (const BenchResult& r : results) {
        os << std::left << std::setw(10) << r.instance << std::right << std::setw(9) << r.facts
           << std::setw(8) << r.rules << std::setw(7) << r.negs << std::setw(10) << std::fixed
           << std::setprecision(3) << r.ground_seconds;
        for (const auto& t : r.timings) {
            std::ostringstream cell;
            if (t.completed)
                cell << std::fixed << std::setprecision(3) << t.seconds;
            else
                cell << "--(" << std::fixed << std::setprecision(0) << t.seconds << "s)";
            os << std::setw(14) << cell.str();
        }
        os << (r.relative_speed_ok ? "" : "   [warning: subset search was not slower]") << "\n";
    }
    return os.str();
}

}  // namespace repairqa
