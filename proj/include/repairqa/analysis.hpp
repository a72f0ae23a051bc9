#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "repairqa/core.hpp"

namespace repairqa {

// Reliance edges between rules. An edge (i, j) in pos_edges means rule
// j positively relies on rule i (i ->+ j); neg_edges likewise for ->-.
// Indices refer to the rule set's order.
struct RelianceGraph {
    std::vector<std::string> nodes;
    std::set<std::pair<std::size_t, std::size_t>> pos_edges;
    std::set<std::pair<std::size_t, std::size_t>> neg_edges;

    bool has_pos(std::size_t from, std::size_t to) const {
        return pos_edges.count({from, to}) > 0;
    }
    bool has_neg(std::size_t from, std::size_t to) const {
        return neg_edges.count({from, to}) > 0;
    }
};

// The four class memberships that gate the engine.
struct ClassReport {
    bool r_acyclic = false;
    std::optional<std::vector<std::vector<std::string>>> r_stratification;
    bool guarded = false;
    std::optional<std::map<std::string, int>> stratification;  // predicate -> level
};

// Decides whether r2 positively (negatively) relies on r1. The two
// rules are renamed apart and their heads skolemized; substitutions are
// enumerated over a canonical universe: the constants of both rules,
// |univ(r1)| + |univ(r2)| fresh constants, and (for the positive check)
// the skolem terms produced by r1's head. A witness over an arbitrary
// database exists iff one exists over this universe.
bool positively_relies(const Rule& r1, const Rule& r2);
bool negatively_relies(const Rule& r1, const Rule& r2);

RelianceGraph reliance_graph(const RuleSet& rules);

bool is_r_acyclic(const RuleSet& rules);
bool is_r_acyclic(const RuleSet& rules, const RelianceGraph& graph);

std::optional<std::vector<std::vector<std::string>>> r_stratify(const RuleSet& rules);
std::optional<std::vector<std::vector<std::string>>> r_stratify(const RuleSet& rules,
                                                                const RelianceGraph& graph);

bool is_guarded(const RuleSet& rules);

std::optional<std::map<std::string, int>> predicate_stratify(const RuleSet& rules);

ClassReport analyze(const RuleSet& rules);

// Strongly connected components of a directed graph, returned in
// topological order of the condensation (sources first). Nodes within
// a component are in ascending index order.
std::vector<std::vector<int>> strongly_connected_components(
    int node_count, const std::vector<std::vector<int>>& successors);

}  // namespace repairqa
