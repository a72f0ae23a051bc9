#include "repairqa/repair.hpp"

#include <algorithm>
#include <atomic>
#include <queue>
#include <set>
#include <thread>

namespace repairqa {

// ---------------------------------------------------------------------------
// PreferenceOrder

PreferenceOrder::PreferenceOrder(PreferenceSpec spec, const RuleSet& rules)
    : spec_(std::move(spec)), rules_(&rules), n_(rules.size()) {
    if (spec_.kind == PrefKind::PrioSubset || spec_.kind == PrefKind::PrioCardinality) {
        std::set<std::size_t> seen;
        for (const auto& level : spec_.priority_levels) {
            std::vector<std::size_t> indices;
            for (const std::string& label : level) {
                std::size_t i = rules.index_of(label);
                if (!seen.insert(i).second)
                    throw DomainError("invalid preference: label '" + label +
                                      "' occurs in two priority levels");
                indices.push_back(i);
            }
            std::sort(indices.begin(), indices.end());
            levels_.push_back(std::move(indices));
        }
        if (seen.size() != n_)
            throw DomainError("invalid preference: priority levels do not cover the rule set");
    }
    if (spec_.kind == PrefKind::Weight) {
        weight_.assign(n_, 1);  // unassigned rules default to weight 1
        for (const auto& [label, w] : spec_.weights) {
            if (w < 1) throw DomainError("invalid preference: weight of '" + label + "' is < 1");
            weight_[rules.index_of(label)] = w;
        }
    }
}

Bitset PreferenceOrder::mask_of(const std::vector<std::string>& labels) const {
    Bitset mask(n_);
    for (const std::string& label : labels) mask.set(rules_->index_of(label));
    return mask;
}

std::vector<std::string> PreferenceOrder::labels_of(const Bitset& mask) const {
    std::vector<std::string> out;
    mask.for_each_set([&](std::size_t i) { out.push_back(rules_->at(i).label()); });
    return out;
}

std::int64_t PreferenceOrder::total_weight(const Bitset& s) const {
    std::int64_t sum = 0;
    s.for_each_set([&](std::size_t i) { sum += weight_[i]; });
    return sum;
}

namespace {
Comparison from_totals(std::int64_t a, std::int64_t b) {
    if (a < b) return Comparison::Less;
    if (a > b) return Comparison::Greater;
    return Comparison::Equivalent;
}
}  // namespace

Comparison PreferenceOrder::compare(const Bitset& s, const Bitset& s2) const {
    switch (spec_.kind) {
        case PrefKind::Subset: {
            if (s == s2) return Comparison::Equivalent;
            if (s.is_subset_of(s2)) return Comparison::Less;
            if (s2.is_subset_of(s)) return Comparison::Greater;
            return Comparison::Incomparable;
        }
        case PrefKind::Cardinality:
            return from_totals(static_cast<std::int64_t>(s.count()),
                               static_cast<std::int64_t>(s2.count()));
        case PrefKind::Weight:
            return from_totals(total_weight(s), total_weight(s2));
        case PrefKind::PrioSubset: {
            // Decided at the first level where the intersections differ.
            for (const auto& level : levels_) {
                Bitset a(n_), b(n_);
                for (std::size_t i : level) {
                    if (s.test(i)) a.set(i);
                    if (s2.test(i)) b.set(i);
                }
                if (a == b) continue;
                if (a.is_subset_of(b)) return Comparison::Less;
                if (b.is_subset_of(a)) return Comparison::Greater;
                return Comparison::Incomparable;
            }
            return Comparison::Equivalent;
        }
        case PrefKind::PrioCardinality: {
            for (const auto& level : levels_) {
                std::int64_t a = 0, b = 0;
                for (std::size_t i : level) {
                    a += s.test(i);
                    b += s2.test(i);
                }
                if (a != b) return from_totals(a, b);
            }
            return Comparison::Equivalent;
        }
    }
    return Comparison::Incomparable;
}

Comparison PreferenceOrder::compare(const std::vector<std::string>& s,
                                    const std::vector<std::string>& s2) const {
    return compare(mask_of(s), mask_of(s2));
}

// ---------------------------------------------------------------------------
// RepairSearch

RepairSearch::RepairSearch(const GroundEngine& engine, SearchConfig cfg)
    : engine_(engine), cfg_(cfg), n_(engine.rule_set().size()) {}

void RepairSearch::check_budget() const {
    if (deadline_ && std::chrono::steady_clock::now() > *deadline_)
        throw SearchTimeout("repair search exceeded its time budget");
}

bool RepairSearch::consistent(const Bitset& mask) {
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(mask);
        if (it != memo_.end()) return it->second;
    }
    bool result = engine_.has_stable_model(mask);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        memo_.emplace(mask, result);
        ++checks_;
    }
    return result;
}

namespace {

// Lexicographic k-combinations over 0..n-1.
struct Combinations {
    std::size_t n, k;
    std::vector<std::size_t> c;
    bool done;

    Combinations(std::size_t n, std::size_t k) : n(n), k(k), done(k > n) {
        c.resize(k);
        for (std::size_t i = 0; i < k; ++i) c[i] = i;
    }

    bool next() {
        if (k == 0 || done) {
            done = true;
            return false;
        }
        std::size_t i = k;
        while (i-- > 0) {
            if (c[i] != i + n - k) {
                ++c[i];
                for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
                return true;
            }
        }
        done = true;
        return false;
    }
};

}  // namespace

std::vector<Bitset> RepairSearch::maximal_consistent(const Bitset& base,
                                                     const std::vector<std::size_t>& deletable) {
    const std::size_t m = deletable.size();
    if (m > cfg_.max_subset_rules)
        throw SearchLimitError("subset search over " + std::to_string(m) +
                               " rules exceeds the bound of " +
                               std::to_string(cfg_.max_subset_rules));

    std::vector<Bitset> found;
    constexpr std::size_t kChunk = 2048;
    std::vector<Bitset> chunk;

    for (std::size_t kept = m + 1; kept-- > 0;) {
        bool open_below = false;  // inconsistent, undominated subset seen at this level

        Combinations comb(m, kept);
        bool level_done = false;
        while (!level_done) {
            chunk.clear();
            do {
                Bitset mask = base;
                for (std::size_t i : comb.c) mask.set(deletable[i]);
                bool dominated = false;
                for (const Bitset& c : found)
                    if (mask.is_subset_of(c)) {
                        dominated = true;
                        break;
                    }
                if (!dominated) chunk.push_back(std::move(mask));
                if (!comb.next()) {
                    level_done = true;
                    break;
                }
            } while (chunk.size() < kChunk);

            check_budget();
            std::vector<char> result(chunk.size(), 0);
            if (cfg_.jobs > 1 && chunk.size() > 1) {
                std::atomic<std::size_t> next{0};
                auto worker = [&]() {
                    for (;;) {
                        std::size_t i = next.fetch_add(1);
                        if (i >= chunk.size()) break;
                        result[i] = consistent(chunk[i]) ? 1 : 0;
                    }
                };
                std::size_t nthreads =
                    std::min<std::size_t>(static_cast<std::size_t>(cfg_.jobs), chunk.size());
                std::vector<std::thread> threads;
                for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(worker);
                for (auto& t : threads) t.join();
            } else {
                for (std::size_t i = 0; i < chunk.size(); ++i) {
                    result[i] = consistent(chunk[i]) ? 1 : 0;
                    if ((i & 63) == 0) check_budget();
                }
            }
            for (std::size_t i = 0; i < chunk.size(); ++i) {
                if (result[i])
                    found.push_back(chunk[i]);
                else
                    open_below = true;
            }
        }

        // Every subset below this level sits inside some set of this
        // level; once each of those is covered by a consistent set, no
        // new maximal set can appear further down.
        if (!open_below) break;
    }
    return found;
}

std::vector<Bitset> RepairSearch::subset_repair_masks() {
    if (cfg_.budget) deadline_ = std::chrono::steady_clock::now() + *cfg_.budget;
    Bitset base(n_);
    std::vector<std::size_t> all(n_);
    for (std::size_t i = 0; i < n_; ++i) all[i] = i;
    return maximal_consistent(base, all);
}

std::vector<Bitset> RepairSearch::cardinality_masks() {
    const std::size_t m = n_;
    if (m > cfg_.max_subset_rules)
        throw SearchLimitError("subset search over " + std::to_string(m) +
                               " rules exceeds the bound of " +
                               std::to_string(cfg_.max_subset_rules));
    // Descending cardinality; the first level with a consistent subset
    // holds exactly the repairs.
    for (std::size_t kept = m + 1; kept-- > 0;) {
        std::vector<Bitset> hits;
        Combinations comb(m, kept);
        bool more = true;
        while (more) {
            Bitset mask(n_);
            for (std::size_t i : comb.c) mask.set(i);
            if (consistent(mask)) hits.push_back(std::move(mask));
            more = comb.next();
            check_budget();
        }
        if (!hits.empty()) return hits;
    }
    return {};  // unreachable: the empty subset is always consistent
}

std::vector<Bitset> RepairSearch::weight_masks(const PreferenceOrder& order) {
    // Best-first over total weight, expanding by single-rule removals.
    // All ancestors of a subset weigh strictly more (weights are >= 1),
    // so pops come in descending weight order and the first consistent
    // pop fixes the repair weight.
    struct Entry {
        std::int64_t weight;
        Bitset mask;
        bool operator<(const Entry& o) const {
            if (weight != o.weight) return weight < o.weight;
            return o.mask < mask;  // deterministic pop order
        }
    };
    std::priority_queue<Entry> heap;
    std::set<Bitset> visited;

    Bitset full = Bitset::full(n_);
    heap.push({order.total_weight(full), full});
    visited.insert(full);

    std::optional<std::int64_t> best;
    std::vector<Bitset> results;
    while (!heap.empty()) {
        check_budget();
        Entry top = heap.top();
        heap.pop();
        if (best && top.weight < *best) break;
        if (consistent(top.mask)) {
            if (!best) best = top.weight;
            results.push_back(top.mask);
            continue;  // children weigh less than the repair weight
        }
        top.mask.for_each_set([&](std::size_t i) {
            Bitset child = top.mask;
            child.reset(i);
            if (visited.insert(child).second)
                heap.push({top.weight - order.weight_of(i), child});
        });
    }
    return results;
}

std::vector<Bitset> RepairSearch::prioritized_masks(const PreferenceOrder& order) {
    // Grow the deletable suffix of priority levels until some consistent
    // set keeps the prefix intact. Any set deficient on that prefix is
    // strictly below such a witness at the first deficient level, so the
    // repairs all contain the prefix and the restricted subset search is
    // exhaustive for them.
    const auto& levels = order.levels();
    const std::size_t nlevels = levels.size();
    for (std::size_t k = nlevels + 1; k-- > 0;) {
        Bitset base(n_);
        std::vector<std::size_t> deletable;
        for (std::size_t l = 0; l < nlevels; ++l) {
            if (l < k)
                for (std::size_t i : levels[l]) base.set(i);
            else
                for (std::size_t i : levels[l]) deletable.push_back(i);
        }
        std::sort(deletable.begin(), deletable.end());
        std::vector<Bitset> masks = maximal_consistent(base, deletable);
        if (!masks.empty()) return maxima(std::move(masks), order);
    }
    return {};  // unreachable: with k = 0 the empty subset is a candidate
}

std::vector<Bitset> RepairSearch::maxima(std::vector<Bitset> masks,
                                         const PreferenceOrder& order) const {
    std::vector<Bitset> out;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < masks.size() && !dominated; ++j)
            if (i != j && order.compare(masks[i], masks[j]) == Comparison::Less) dominated = true;
        if (!dominated) out.push_back(masks[i]);
    }
    return out;
}

std::vector<Bitset> RepairSearch::preferred_repair_masks(const PreferenceOrder& order) {
    if (cfg_.budget) deadline_ = std::chrono::steady_clock::now() + *cfg_.budget;

    if (order.kind() == PrefKind::Subset) {
        Bitset base(n_);
        std::vector<std::size_t> all(n_);
        for (std::size_t i = 0; i < n_; ++i) all[i] = i;
        return maximal_consistent(base, all);
    }

    if (cfg_.strategy == SearchConfig::Strategy::Reference) {
        Bitset base(n_);
        std::vector<std::size_t> all(n_);
        for (std::size_t i = 0; i < n_; ++i) all[i] = i;
        return maxima(maximal_consistent(base, all), order);
    }

    switch (order.kind()) {
        case PrefKind::Cardinality:
            return cardinality_masks();
        case PrefKind::Weight:
            return weight_masks(order);
        case PrefKind::PrioSubset:
        case PrefKind::PrioCardinality:
            try {
                return prioritized_masks(order);
            } catch (const SearchLimitError&) {
                // A too-wide stage; the reference algorithm may still fit.
                Bitset base(n_);
                std::vector<std::size_t> all(n_);
                for (std::size_t i = 0; i < n_; ++i) all[i] = i;
                return maxima(maximal_consistent(base, all), order);
            }
        default:
            break;
    }
    throw DomainError("unsupported preference kind");
}

RepairSet RepairSearch::finish(std::vector<Bitset> masks, PreferenceSpec pref) {
    std::vector<std::vector<std::size_t>> keys;
    keys.reserve(masks.size());
    for (const Bitset& m : masks) keys.push_back(m.set_bits());
    std::vector<std::size_t> idx(masks.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    RepairSet out;
    out.preference = std::move(pref);
    for (std::size_t i : idx) {
        std::vector<std::string> labels;
        for (std::size_t bit : keys[i]) labels.push_back(engine_.rule_set().at(bit).label());
        std::vector<Instance> witness = engine_.stable_models(masks[i], 1);
        if (witness.empty())
            throw std::logic_error("repair lost its stable model between search and report");
        out.repairs.push_back(std::move(labels));
        out.witnesses.push_back(std::move(witness.front()));
    }
    return out;
}

RepairSet RepairSearch::subset_repairs() {
    return finish(subset_repair_masks(), PreferenceSpec::subset());
}

RepairSet RepairSearch::preferred_repairs(const PreferenceSpec& pref) {
    PreferenceOrder order(pref, engine_.rule_set());
    return finish(preferred_repair_masks(order), pref);
}

// ---------------------------------------------------------------------------

RepairSet subset_repairs(const Database& db, const RuleSet& rules, const EngineConfig& ecfg,
                         const SearchConfig& scfg) {
    GroundEngine engine(db, rules, ecfg);
    RepairSearch search(engine, scfg);
    return search.subset_repairs();
}

RepairSet preferred_repairs(const Database& db, const RuleSet& rules, const PreferenceSpec& pref,
                            const EngineConfig& ecfg, const SearchConfig& scfg) {
    GroundEngine engine(db, rules, ecfg);
    RepairSearch search(engine, scfg);
    return search.preferred_repairs(pref);
}

}  // namespace repairqa
