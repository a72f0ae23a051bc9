#include "repairqa/analysis.hpp"

#include <algorithm>
#include <functional>

namespace repairqa {

namespace {

// ---------------------------------------------------------------------------
// Reliance decision procedure

struct RenamedRule {
    AtomList body_pos;
    AtomList body_neg;
    AtomList head;  // skolemized
    std::vector<std::string> univ_vars;
};

// Skolemizes the head first (so the skolem function identity stays tied
// to the original rule and existential variable), then renames every
// universal variable with the given prefix.
RenamedRule rename_apart(const Rule& r, const std::string& prefix) {
    Binding b;
    RenamedRule out;
    for (const std::string& v : r.univ_vars()) {
        std::string fresh = prefix + v;
        b.bind(v, Term::variable(fresh));
        out.univ_vars.push_back(fresh);
    }
    out.body_pos = apply_substitution(r.body_pos(), b);
    out.body_neg = apply_substitution(r.body_neg(), b);
    out.head = apply_substitution(r.skolemized_head(), b);
    return out;
}

void collect_constants(const Term& t, std::set<Term>& out) {
    if (t.is_constant()) {
        out.insert(t);
    } else if (t.is_skolem()) {
        for (const Term& a : t.skolem_args()) collect_constants(a, out);
    }
}

void collect_constants(const AtomList& atoms, std::set<Term>& out) {
    for (const Atom& a : atoms)
        for (const Term& t : a.args()) collect_constants(t, out);
}

bool atom_has_skolem(const Atom& a) {
    for (const Term& t : a.args())
        if (t.depth() > 0) return true;
    return false;
}

bool shares_predicate(const AtomList& xs, const AtomList& ys) {
    for (const Atom& x : xs)
        for (const Atom& y : ys)
            if (x.predicate() == y.predicate()) return true;
    return false;
}

using AtomSet = std::set<Atom>;

AtomSet to_set(const AtomList& atoms) { return AtomSet(atoms.begin(), atoms.end()); }

bool intersects(const AtomSet& a, const AtomSet& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else
            return true;
    }
    return false;
}

// Enumerates all maps from `vars` into `universe`, invoking `fn` with
// each complete binding. Stops early when fn returns true.
bool for_each_assignment(const std::vector<std::string>& vars, const TermList& universe,
                         Binding& binding, std::size_t i,
                         const std::function<bool(const Binding&)>& fn) {
    if (i == vars.size()) return fn(binding);
    for (const Term& t : universe) {
        Binding saved = binding;
        binding.bind(vars[i], t);
        if (for_each_assignment(vars, universe, binding, i + 1, fn)) return true;
        binding = saved;
    }
    return false;
}

bool for_each_assignment(const std::vector<std::string>& vars, const TermList& universe,
                         const std::function<bool(const Binding&)>& fn) {
    Binding b;
    if (vars.empty()) return fn(b);
    return for_each_assignment(vars, universe, b, 0, fn);
}

TermList base_universe(const RenamedRule& a, const RenamedRule& b) {
    std::set<Term> constants;
    collect_constants(a.body_pos, constants);
    collect_constants(a.body_neg, constants);
    collect_constants(a.head, constants);
    collect_constants(b.body_pos, constants);
    collect_constants(b.body_neg, constants);
    collect_constants(b.head, constants);
    std::size_t fresh = a.univ_vars.size() + b.univ_vars.size();
    for (std::size_t i = 0; i < fresh; ++i)
        constants.insert(Term::constant("_c" + std::to_string(i + 1)));
    return TermList(constants.begin(), constants.end());
}

}  // namespace

bool positively_relies(const Rule& r1, const Rule& r2) {
    RenamedRule a = rename_apart(r1, "_a_");
    RenamedRule b = rename_apart(r2, "_b_");

    // Some atom of B2+ must come from H1's output, so the predicates
    // must overlap.
    if (!shares_predicate(b.body_pos, a.head)) return false;

    TermList constants = base_universe(a, b);

    return for_each_assignment(a.univ_vars, constants, [&](const Binding& theta1) {
        AtomSet h1 = to_set(apply_substitution(a.head, theta1, true));
        AtomSet d0 = to_set(apply_substitution(a.body_pos, theta1, true));
        AtomSet b1n = to_set(apply_substitution(a.body_neg, theta1, true));

        // r2's variables may additionally take the skolem terms r1 produced.
        TermList universe2 = constants;
        std::set<Term> sk;
        for (const Atom& atom : h1)
            for (const Term& t : atom.args())
                if (t.is_skolem()) sk.insert(t);
        universe2.insert(universe2.end(), sk.begin(), sk.end());

        return for_each_assignment(b.univ_vars, universe2, [&](const Binding& theta2) {
            AtomSet b2p = to_set(apply_substitution(b.body_pos, theta2, true));

            // Candidate database D := B1+th  u  (B2+th \ H1th); databases
            // cannot contain nulls, so a skolem-bearing leftover kills
            // this substitution.
            AtomSet d = d0;
            for (const Atom& atom : b2p) {
                if (h1.count(atom)) continue;
                if (atom_has_skolem(atom)) return false;
                d.insert(atom);
            }
            // B2+th must not be fully inside D.
            bool outside = false;
            for (const Atom& atom : b2p)
                if (!d.count(atom)) {
                    outside = true;
                    break;
                }
            if (!outside) return false;

            if (intersects(b1n, d)) return false;

            AtomSet b2n = to_set(apply_substitution(b.body_neg, theta2, true));
            if (intersects(b2n, d)) return false;
            if (intersects(b2n, h1)) return false;

            AtomSet h2 = to_set(apply_substitution(b.head, theta2, true));
            for (const Atom& atom : h2)
                if (!d.count(atom) && !h1.count(atom)) return true;  // H2th not covered
            return false;
        });
    });
}

bool negatively_relies(const Rule& r1, const Rule& r2) {
    if (r2.body_neg().empty()) return false;

    RenamedRule a = rename_apart(r1, "_a_");
    RenamedRule b = rename_apart(r2, "_b_");

    if (!shares_predicate(b.body_neg, a.head)) return false;

    // B2+th must land inside a database, which forces every variable of
    // r2 onto constants; likewise for r1.
    TermList constants = base_universe(a, b);

    return for_each_assignment(a.univ_vars, constants, [&](const Binding& theta1) {
        AtomSet h1 = to_set(apply_substitution(a.head, theta1, true));
        AtomSet b1p = to_set(apply_substitution(a.body_pos, theta1, true));
        AtomSet b1n = to_set(apply_substitution(a.body_neg, theta1, true));

        return for_each_assignment(b.univ_vars, constants, [&](const Binding& theta2) {
            AtomSet d = b1p;
            AtomSet b2p = to_set(apply_substitution(b.body_pos, theta2, true));
            d.insert(b2p.begin(), b2p.end());

            if (intersects(b1n, d)) return false;
            AtomSet b2n = to_set(apply_substitution(b.body_neg, theta2, true));
            if (!intersects(b2n, h1)) return false;
            if (intersects(b2n, d)) return false;
            return true;
        });
    });
}

RelianceGraph reliance_graph(const RuleSet& rules) {
    RelianceGraph g;
    g.nodes = rules.labels();
    const std::size_t n = rules.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (positively_relies(rules.at(i), rules.at(j))) g.pos_edges.insert({i, j});
            if (negatively_relies(rules.at(i), rules.at(j))) g.neg_edges.insert({i, j});
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Strongly connected components (iterative Tarjan)

std::vector<std::vector<int>> strongly_connected_components(
    int node_count, const std::vector<std::vector<int>>& successors) {
    std::vector<int> index(node_count, -1), lowlink(node_count, 0);
    std::vector<bool> on_stack(node_count, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int next_index = 0;

    struct Frame {
        int node;
        std::size_t succ;
    };
    std::vector<Frame> frames;

    for (int start = 0; start < node_count; ++start) {
        if (index[start] != -1) continue;
        frames.push_back({start, 0});
        index[start] = lowlink[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.succ < successors[f.node].size()) {
                int w = successors[f.node][f.succ++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[f.node] = std::min(lowlink[f.node], index[w]);
                }
            } else {
                if (lowlink[f.node] == index[f.node]) {
                    std::vector<int> scc;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        scc.push_back(w);
                    } while (w != f.node);
                    std::sort(scc.begin(), scc.end());
                    sccs.push_back(std::move(scc));
                }
                int done = f.node;
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().node] =
                        std::min(lowlink[frames.back().node], lowlink[done]);
            }
        }
    }
    // Tarjan emits components in reverse topological order.
    std::reverse(sccs.begin(), sccs.end());
    return sccs;
}

// ---------------------------------------------------------------------------
// Class checks

bool is_r_acyclic(const RuleSet& rules) { return is_r_acyclic(rules, reliance_graph(rules)); }

bool is_r_acyclic(const RuleSet& rules, const RelianceGraph& graph) {
    const int n = static_cast<int>(rules.size());
    std::vector<std::vector<int>> succ(n);
    for (const auto& [from, to] : graph.pos_edges)
        succ[static_cast<int>(from)].push_back(static_cast<int>(to));

    auto sccs = strongly_connected_components(n, succ);
    for (const auto& scc : sccs) {
        bool cyclic = scc.size() > 1 ||
                      graph.has_pos(static_cast<std::size_t>(scc[0]),
                                    static_cast<std::size_t>(scc[0]));
        if (!cyclic) continue;
        for (int node : scc)
            if (rules.at(static_cast<std::size_t>(node)).has_existentials()) return false;
    }
    return true;
}

std::optional<std::vector<std::vector<std::string>>> r_stratify(const RuleSet& rules) {
    return r_stratify(rules, reliance_graph(rules));
}

std::optional<std::vector<std::vector<std::string>>> r_stratify(const RuleSet& rules,
                                                                const RelianceGraph& graph) {
    const int n = static_cast<int>(rules.size());
    std::vector<std::vector<int>> succ(n);
    for (const auto& [from, to] : graph.pos_edges)
        succ[static_cast<int>(from)].push_back(static_cast<int>(to));
    for (const auto& [from, to] : graph.neg_edges)
        succ[static_cast<int>(from)].push_back(static_cast<int>(to));

    auto sccs = strongly_connected_components(n, succ);

    // A negative reliance inside one component would need i < i.
    std::vector<int> component_of(n, -1);
    for (std::size_t c = 0; c < sccs.size(); ++c)
        for (int node : sccs[c]) component_of[node] = static_cast<int>(c);
    for (const auto& [from, to] : graph.neg_edges)
        if (component_of[static_cast<int>(from)] == component_of[static_cast<int>(to)])
            return std::nullopt;

    // Merge consecutive components greedily; a component starts a new
    // block when a negative edge arrives from the block under
    // construction.
    std::vector<std::vector<std::string>> blocks;
    std::vector<std::size_t> current;  // rule indices
    auto flush = [&]() {
        if (current.empty()) return;
        std::sort(current.begin(), current.end());
        std::vector<std::string> labels;
        for (std::size_t idx : current) labels.push_back(rules.at(idx).label());
        blocks.push_back(std::move(labels));
        current.clear();
    };
    for (const auto& scc : sccs) {
        bool needs_new_block = false;
        for (std::size_t from : current) {
            for (int node : scc)
                if (graph.has_neg(from, static_cast<std::size_t>(node))) {
                    needs_new_block = true;
                    break;
                }
            if (needs_new_block) break;
        }
        if (needs_new_block) flush();
        for (int node : scc) current.push_back(static_cast<std::size_t>(node));
    }
    flush();
    return blocks;
}

bool is_guarded(const RuleSet& rules) {
    for (const Rule& r : rules) {
        if (r.univ_vars().empty()) continue;
        std::set<std::string> univ(r.univ_vars().begin(), r.univ_vars().end());
        bool guard_found = false;
        for (const Atom& a : r.body_pos()) {
            std::vector<std::string> vars = a.variables();
            std::set<std::string> have(vars.begin(), vars.end());
            if (std::includes(have.begin(), have.end(), univ.begin(), univ.end())) {
                guard_found = true;
                break;
            }
        }
        if (!guard_found) return false;
    }
    return true;
}

std::optional<std::map<std::string, int>> predicate_stratify(const RuleSet& rules) {
    std::vector<std::string> preds;
    std::map<std::string, int> id;
    auto intern = [&](const std::string& p) {
        auto [it, inserted] = id.emplace(p, static_cast<int>(preds.size()));
        if (inserted) preds.push_back(p);
        return it->second;
    };

    // Edge S -> R with strictness flag; R is a head predicate, S a body
    // predicate of the same rule.
    std::set<std::tuple<int, int, bool>> edges;
    for (const Rule& r : rules) {
        for (const Atom& h : r.head()) {
            int hr = intern(h.predicate());
            for (const Atom& b : r.body_pos()) edges.emplace(intern(b.predicate()), hr, false);
            for (const Atom& b : r.body_neg()) edges.emplace(intern(b.predicate()), hr, true);
        }
    }

    const int n = static_cast<int>(preds.size());
    std::vector<std::vector<int>> succ(n);
    for (const auto& [s, rpred, strict] : edges) succ[s].push_back(rpred);

    auto sccs = strongly_connected_components(n, succ);
    std::vector<int> component_of(n, -1);
    for (std::size_t c = 0; c < sccs.size(); ++c)
        for (int node : sccs[c]) component_of[node] = static_cast<int>(c);

    for (const auto& [s, rpred, strict] : edges)
        if (strict && component_of[s] == component_of[rpred]) return std::nullopt;

    // Longest-path levels over the condensation: >= across positive
    // edges, strictly increasing across negated ones. Components are in
    // topological order, so one pass suffices.
    std::vector<int> level(sccs.size(), 0);
    for (std::size_t c = 0; c < sccs.size(); ++c) {
        for (const auto& [s, rpred, strict] : edges) {
            int cs = component_of[s], cr = component_of[rpred];
            if (static_cast<std::size_t>(cs) != c || cs == cr) continue;
            level[cr] = std::max(level[cr], level[cs] + (strict ? 1 : 0));
        }
    }

    std::map<std::string, int> out;
    for (int p = 0; p < n; ++p) out[preds[p]] = level[component_of[p]];
    return out;
}

ClassReport analyze(const RuleSet& rules) {
    ClassReport report;
    RelianceGraph graph = reliance_graph(rules);
    report.r_acyclic = is_r_acyclic(rules, graph);
    report.r_stratification = r_stratify(rules, graph);
    report.guarded = is_guarded(rules);
    report.stratification = predicate_stratify(rules);
    return report;
}

}  // namespace repairqa
