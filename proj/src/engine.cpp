#include "repairqa/engine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "repairqa/analysis.hpp"

namespace repairqa {

// ---------------------------------------------------------------------------
// Skolemization

std::string NormalRule::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < head.size(); ++i) os << (i ? ", " : "") << head[i].to_string();
    os << " <- ";
    bool first = true;
    for (const Atom& a : body_pos) {
        os << (first ? "" : ", ") << a.to_string();
        first = false;
    }
    for (const Atom& a : body_neg) {
        os << (first ? "not " : ", not ") << a.to_string();
        first = false;
    }
    os << ".";
    return os.str();
}

NormalRule skolemize(const Rule& rule) {
    return NormalRule{rule.label(), rule.skolemized_head(), rule.body_pos(), rule.body_neg()};
}

std::vector<NormalRule> skolemize(const RuleSet& rules) {
    std::vector<NormalRule> out;
    out.reserve(rules.size());
    for (const Rule& r : rules) out.push_back(skolemize(r));
    return out;
}

void EngineConfig::validate() const {
    if (max_skolem_depth <= 0) throw DomainError("max_skolem_depth must be positive");
    if (max_ground_atoms == 0) throw DomainError("max_ground_atoms must be positive");
    if (max_neg_branch == 0) throw DomainError("max_neg_branch must be positive");
}

// ---------------------------------------------------------------------------
// GroundProgram

std::optional<AtomId> GroundProgram::find(const Atom& a) const {
    auto it = intern_.find(a);
    if (it == intern_.end()) return std::nullopt;
    return it->second;
}

Instance GroundProgram::to_instance(const Bitset& member) const {
    AtomList atoms;
    member.for_each_set([&](std::size_t id) { atoms.push_back(atoms_[id]); });
    return Instance(std::move(atoms));
}

Instance GroundProgram::closure() const {
    return Instance(AtomList(atoms_.begin(), atoms_.begin() + static_cast<long>(closure_count_)));
}

// ---------------------------------------------------------------------------
// Grounder: semi-naive positive closure with rule-instance emission

namespace {

struct TermTemplate {
    enum class Kind { Const, Var, Skolem } kind;
    Term constant = Term::constant("_");
    int slot = -1;
    SkolemId fn;
    std::vector<TermTemplate> args;  // skolem arguments
};

struct AtomTemplate {
    std::string pred;
    std::vector<TermTemplate> args;
};

struct PatternArg {
    bool is_var;
    int slot = -1;
    Term constant = Term::constant("_");
};

struct AtomPattern {
    std::string pred;
    std::vector<PatternArg> args;
};

struct CompiledRule {
    std::uint32_t rule_index;
    std::vector<AtomPattern> body;    // positive patterns to join
    std::vector<AtomTemplate> negs;   // instantiated, never joined
    std::vector<AtomTemplate> heads;  // instantiated, may introduce skolems
    int num_slots = 0;
};

struct PosKey {
    std::string pred;
    std::size_t pos;
    Term term;

    bool operator==(const PosKey& o) const {
        return pos == o.pos && pred == o.pred && term == o.term;
    }
};

struct PosKeyHash {
    std::size_t operator()(const PosKey& k) const {
        std::size_t h = std::hash<std::string>{}(k.pred);
        h = hash_combine(h, k.pos);
        return hash_combine(h, k.term.hash());
    }
};

}  // namespace

class Grounder {
public:
    Grounder(const std::vector<NormalRule>& rules, const Database& db, const EngineConfig& cfg)
        : cfg_(cfg) {
        cfg_.validate();
        compile(rules);
        for (const Atom& fact : db) {
            AtomId id = intern(fact);
            out_.base_facts_.push_back(id);
        }
    }

    GroundProgram run() {
        // Rules with an empty positive body fire exactly once.
        const Term placeholder = Term::constant("_");
        std::vector<Term> slots;
        for (const CompiledRule& rule : rules_) {
            if (!rule.body.empty()) continue;
            slots.assign(static_cast<std::size_t>(rule.num_slots), placeholder);
            std::vector<AtomId> body;
            emit(rule, slots, body);
        }

        std::size_t delta_start = 0;
        std::size_t delta_end = out_.atoms_.size();
        std::vector<AtomId> body_ids;
        std::vector<bool> bound;
        std::vector<int> trail;
        while (delta_start < delta_end) {
            for (const CompiledRule& rule : rules_) {
                for (std::size_t p = 0; p < rule.body.size(); ++p) {
                    slots.assign(static_cast<std::size_t>(rule.num_slots), placeholder);
                    bound.assign(static_cast<std::size_t>(rule.num_slots), false);
                    body_ids.assign(rule.body.size(), 0);
                    trail.clear();
                    join_rec(rule, p, 0, delta_start, delta_end, slots, bound, body_ids, trail);
                }
            }
            delta_start = delta_end;
            delta_end = out_.atoms_.size();
        }
        finalize_negs();
        return std::move(out_);
    }

private:
    void compile(const std::vector<NormalRule>& rules) {
        rules_.reserve(rules.size());
        for (std::size_t ri = 0; ri < rules.size(); ++ri) {
            const NormalRule& r = rules[ri];
            CompiledRule cr;
            cr.rule_index = static_cast<std::uint32_t>(ri);
            std::map<std::string, int> slot_of;
            auto slot = [&](const std::string& var) {
                auto [it, inserted] = slot_of.emplace(var, cr.num_slots);
                if (inserted) ++cr.num_slots;
                return it->second;
            };
            for (const Atom& a : r.body_pos) {
                AtomPattern pat;
                pat.pred = a.predicate();
                for (const Term& t : a.args()) {
                    PatternArg arg;
                    if (t.is_variable()) {
                        arg.is_var = true;
                        arg.slot = slot(t.name());
                    } else {
                        arg.is_var = false;
                        arg.constant = t;
                    }
                    pat.args.push_back(std::move(arg));
                }
                cr.body.push_back(std::move(pat));
            }
            auto compile_template = [&](const Term& t, auto&& self) -> TermTemplate {
                TermTemplate tt;
                if (t.is_variable()) {
                    tt.kind = TermTemplate::Kind::Var;
                    tt.slot = slot(t.name());
                } else if (t.is_constant()) {
                    tt.kind = TermTemplate::Kind::Const;
                    tt.constant = t;
                } else {
                    tt.kind = TermTemplate::Kind::Skolem;
                    tt.fn = t.skolem_fn();
                    for (const Term& a : t.skolem_args()) tt.args.push_back(self(a, self));
                }
                return tt;
            };
            auto compile_atom = [&](const Atom& a) {
                AtomTemplate at;
                at.pred = a.predicate();
                for (const Term& t : a.args())
                    at.args.push_back(compile_template(t, compile_template));
                return at;
            };
            for (const Atom& a : r.body_neg) cr.negs.push_back(compile_atom(a));
            for (const Atom& a : r.head) cr.heads.push_back(compile_atom(a));
            rules_.push_back(std::move(cr));
        }
    }

    AtomId intern(const Atom& a) {
        auto it = out_.intern_.find(a);
        if (it != out_.intern_.end()) return it->second;
        if (out_.atoms_.size() >= cfg_.max_ground_atoms)
            throw EngineError(EngineError::Kind::AtomCap,
                              "grounding exceeded the atom cap of " +
                                  std::to_string(cfg_.max_ground_atoms));
        AtomId id = static_cast<AtomId>(out_.atoms_.size());
        out_.atoms_.push_back(a);
        out_.intern_.emplace(a, id);
        if (a.is_falsum()) out_.falsum_ = id;
        by_pred_[a.predicate()].push_back(id);
        for (std::size_t i = 0; i < a.arity(); ++i)
            by_arg_[PosKey{a.predicate(), i, a.args()[i]}].push_back(id);
        return id;
    }

    Term instantiate(const TermTemplate& t, const std::vector<Term>& slots) {
        switch (t.kind) {
            case TermTemplate::Kind::Const:
                return t.constant;
            case TermTemplate::Kind::Var:
                return slots[static_cast<std::size_t>(t.slot)];
            case TermTemplate::Kind::Skolem: {
                TermList args;
                args.reserve(t.args.size());
                for (const TermTemplate& a : t.args) args.push_back(instantiate(a, slots));
                return Term::skolem(t.fn, std::move(args));
            }
        }
        return t.constant;
    }

    Atom instantiate(const AtomTemplate& at, const std::vector<Term>& slots) {
        TermList args;
        args.reserve(at.args.size());
        for (const TermTemplate& t : at.args) args.push_back(instantiate(t, slots));
        return Atom(at.pred, std::move(args));
    }

    void emit(const CompiledRule& rule, const std::vector<Term>& slots,
              const std::vector<AtomId>& body_ids) {
        std::vector<AtomId> body = body_ids;
        std::sort(body.begin(), body.end());
        body.erase(std::unique(body.begin(), body.end()), body.end());

        // Negative atoms get their ids after the closure is complete so
        // they never become join candidates.
        AtomList negs;
        negs.reserve(rule.negs.size());
        for (const AtomTemplate& at : rule.negs) negs.push_back(instantiate(at, slots));

        for (const AtomTemplate& ht : rule.heads) {
            Atom head = instantiate(ht, slots);
            if (head.depth() > cfg_.max_skolem_depth) {
                std::string chain;
                for (const Term& t : head.args())
                    if (t.depth() == head.depth()) {
                        chain = t.to_string();
                        break;
                    }
                throw EngineError(EngineError::Kind::DepthLimit,
                                  "skolem depth limit " + std::to_string(cfg_.max_skolem_depth) +
                                      " exceeded at " + chain +
                                      "; the rule set is likely not R-acyclic");
            }
            AtomId head_id = intern(head);
            GroundRule gr;
            gr.head = head_id;
            gr.body_pos = body;
            gr.rule_index = rule.rule_index;
            out_.rules_.push_back(std::move(gr));
            pending_negs_.push_back(negs);
        }
    }

    // Extends the partial match one body position at a time, in a fixed
    // order: the delta position p first, then left to right. Position
    // roles: q < p matches old atoms only, q == p delta atoms, q > p
    // anything known this round; every instance is emitted exactly once,
    // in the round its newest body atom appeared.
    void join_rec(const CompiledRule& rule, std::size_t p, std::size_t step,
                  std::size_t delta_start, std::size_t delta_end, std::vector<Term>& slots,
                  std::vector<bool>& bound, std::vector<AtomId>& body_ids,
                  std::vector<int>& trail) {
        if (step == rule.body.size()) {
            emit(rule, slots, body_ids);
            return;
        }
        std::size_t q = step == 0 ? p : (step <= p ? step - 1 : step);
        std::size_t lo = 0, hi = delta_end;
        if (q == p) {
            lo = delta_start;
        } else if (q < p) {
            hi = delta_start;
        }
        const AtomPattern& pat = rule.body[q];

        const std::vector<AtomId>* candidates = nullptr;
        for (std::size_t i = 0; i < pat.args.size(); ++i) {
            const PatternArg& arg = pat.args[i];
            if (!arg.is_var) {
                candidates = lookup(PosKey{pat.pred, i, arg.constant});
                break;
            }
            if (bound[static_cast<std::size_t>(arg.slot)]) {
                candidates =
                    lookup(PosKey{pat.pred, i, slots[static_cast<std::size_t>(arg.slot)]});
                break;
            }
        }
        if (!candidates) {
            auto it = by_pred_.find(pat.pred);
            if (it == by_pred_.end()) return;
            candidates = &it->second;
        }

        auto first = std::lower_bound(candidates->begin(), candidates->end(), lo);
        for (auto it = first; it != candidates->end() && *it < hi; ++it) {
            const Atom& atom = out_.atoms_[*it];
            if (atom.arity() != pat.args.size()) continue;
            std::size_t mark = trail.size();
            bool ok = true;
            for (std::size_t i = 0; i < pat.args.size(); ++i) {
                const PatternArg& arg = pat.args[i];
                const Term& value = atom.args()[i];
                if (!arg.is_var) {
                    if (!(arg.constant == value)) {
                        ok = false;
                        break;
                    }
                } else {
                    std::size_t s = static_cast<std::size_t>(arg.slot);
                    if (bound[s]) {
                        if (!(slots[s] == value)) {
                            ok = false;
                            break;
                        }
                    } else {
                        slots[s] = value;
                        bound[s] = true;
                        trail.push_back(arg.slot);
                    }
                }
            }
            if (ok) {
                body_ids[q] = *it;
                join_rec(rule, p, step + 1, delta_start, delta_end, slots, bound, body_ids,
                         trail);
            }
            while (trail.size() > mark) {
                bound[static_cast<std::size_t>(trail.back())] = false;
                trail.pop_back();
            }
        }
    }

    const std::vector<AtomId>* lookup(const PosKey& key) {
        auto it = by_arg_.find(key);
        return it == by_arg_.end() ? &kEmpty : &it->second;
    }

    void finalize_negs() {
        out_.closure_count_ = out_.atoms_.size();
        std::vector<AtomId> neg_ids;
        for (std::size_t i = 0; i < out_.rules_.size(); ++i) {
            std::vector<AtomId> ids;
            ids.reserve(pending_negs_[i].size());
            for (const Atom& a : pending_negs_[i]) {
                auto it = out_.intern_.find(a);
                AtomId id;
                if (it != out_.intern_.end()) {
                    id = it->second;
                } else {
                    if (out_.atoms_.size() >= cfg_.max_ground_atoms)
                        throw EngineError(EngineError::Kind::AtomCap,
                                          "grounding exceeded the atom cap of " +
                                              std::to_string(cfg_.max_ground_atoms));
                    id = static_cast<AtomId>(out_.atoms_.size());
                    out_.atoms_.push_back(a);
                    out_.intern_.emplace(a, id);
                }
                ids.push_back(id);
                neg_ids.push_back(id);
            }
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
            out_.rules_[i].body_neg = std::move(ids);
        }
        std::sort(neg_ids.begin(), neg_ids.end());
        neg_ids.erase(std::unique(neg_ids.begin(), neg_ids.end()), neg_ids.end());
        out_.neg_atoms_ = std::move(neg_ids);
    }

    static const std::vector<AtomId> kEmpty;

    EngineConfig cfg_;
    GroundProgram out_;
    std::vector<CompiledRule> rules_;
    std::vector<AtomList> pending_negs_;
    std::unordered_map<std::string, std::vector<AtomId>> by_pred_;
    std::unordered_map<PosKey, std::vector<AtomId>, PosKeyHash> by_arg_;
};

const std::vector<AtomId> Grounder::kEmpty;

GroundProgram ground_relevant(const std::vector<NormalRule>& rules, const Database& db,
                              const EngineConfig& cfg) {
    // The closure is deterministic: atoms are interned in derivation
    // order, rule instances in emission order.
    Grounder g(rules, db, cfg);
    return g.run();
}

// ---------------------------------------------------------------------------
// Reduct and least model

std::vector<PositiveGroundRule> gl_reduct(const GroundProgram& g, const Instance& m) {
    Bitset member(g.atom_count());
    for (const Atom& a : m) {
        auto id = g.find(a);
        if (id) member.set(*id);
    }
    std::vector<PositiveGroundRule> out;
    for (const GroundRule& r : g.rules()) {
        bool blocked = false;
        for (AtomId neg : r.body_neg)
            if (member.test(neg)) {
                blocked = true;
                break;
            }
        if (!blocked) out.push_back({r.head, r.body_pos});
    }
    return out;
}

Instance least_model(const GroundProgram& g, const std::vector<PositiveGroundRule>& rules) {
    return least_model(g, rules, g.base_facts());
}

Instance least_model(const GroundProgram& g, const std::vector<PositiveGroundRule>& rules,
                     const std::vector<AtomId>& base_facts) {
    Bitset truth(g.atom_count());
    std::vector<std::vector<std::uint32_t>> watch(g.atom_count());
    std::vector<std::uint32_t> counter(rules.size());
    std::deque<AtomId> queue;

    for (std::size_t r = 0; r < rules.size(); ++r) {
        counter[r] = static_cast<std::uint32_t>(rules[r].body.size());
        for (AtomId a : rules[r].body) watch[a].push_back(static_cast<std::uint32_t>(r));
        if (counter[r] == 0 && !truth.test(rules[r].head)) {
            truth.set(rules[r].head);
            queue.push_back(rules[r].head);
        }
    }
    for (AtomId a : base_facts)
        if (!truth.test(a)) {
            truth.set(a);
            queue.push_back(a);
        }
    while (!queue.empty()) {
        AtomId a = queue.front();
        queue.pop_front();
        for (std::uint32_t r : watch[a]) {
            if (--counter[r] == 0) {
                AtomId head = rules[r].head;
                if (!truth.test(head)) {
                    truth.set(head);
                    queue.push_back(head);
                }
            }
        }
    }
    return g.to_instance(truth);
}

// ---------------------------------------------------------------------------
// GroundEngine

namespace {

// Shared fixpoint machinery over the ground program. Counters and
// epochs avoid clearing between runs within one call; the watch index
// (atom -> rules watching it) is built once per engine.
struct Runner {
    const GroundProgram& g;
    const std::vector<std::vector<std::uint32_t>>& watch;
    std::vector<std::uint32_t> counter;
    std::vector<std::uint32_t> epoch_of;
    std::uint32_t epoch = 0;

    Runner(const GroundProgram& prog, const std::vector<std::vector<std::uint32_t>>& watch_index)
        : g(prog),
          watch(watch_index),
          counter(prog.rules().size(), 0),
          epoch_of(prog.rules().size(), 0) {}

    // Closes `truth` under the rules listed in `run_rules`, firing a
    // rule only when its negative body misses `neg_truth`. Every atom
    // enters the queue exactly once: pre-existing atoms in the seeding
    // sweep, derived ones when their bit flips.
    void run(const std::vector<std::uint32_t>& run_rules, Bitset& truth, const Bitset& neg_truth) {
        ++epoch;
        std::vector<AtomId> queue;
        truth.for_each_set([&](std::size_t a) { queue.push_back(static_cast<AtomId>(a)); });
        auto derive = [&](AtomId a) {
            if (!truth.test(a)) {
                truth.set(a);
                queue.push_back(a);
            }
        };
        for (std::uint32_t r : run_rules) {
            epoch_of[r] = epoch;
            counter[r] = static_cast<std::uint32_t>(g.rules()[r].body_pos.size());
            if (counter[r] == 0 && neg_ok(r, neg_truth)) derive(g.rules()[r].head);
        }

        while (!queue.empty()) {
            AtomId a = queue.back();
            queue.pop_back();
            for (std::uint32_t r : watch[a]) {
                if (epoch_of[r] != epoch) continue;
                if (counter[r] == 0) continue;
                if (--counter[r] == 0 && neg_ok(r, neg_truth)) derive(g.rules()[r].head);
            }
        }
    }

    bool neg_ok(std::uint32_t r, const Bitset& neg_truth) const {
        for (AtomId neg : g.rules()[r].body_neg)
            if (neg_truth.test(neg)) return false;
        return true;
    }
};

}  // namespace

GroundEngine::GroundEngine(Database db, RuleSet rules, EngineConfig cfg)
    : db_(std::move(db)), rules_(std::move(rules)), cfg_(std::move(cfg)) {
    cfg_.validate();
    skolemized_ = skolemize(rules_);
    ground_ = ground_relevant(skolemized_, db_, cfg_);
    if (!cfg_.disable_stratified_path) global_strata_ = predicate_stratify(rules_);
    watch_.resize(ground_.atom_count());
    for (std::size_t r = 0; r < ground_.rules().size(); ++r)
        for (AtomId a : ground_.rules()[r].body_pos)
            watch_[a].push_back(static_cast<std::uint32_t>(r));
}

std::optional<std::map<std::string, int>> GroundEngine::strata_for(const Bitset& active) const {
    if (cfg_.disable_stratified_path) return std::nullopt;
    if (global_strata_) return global_strata_;
    std::vector<Rule> subset;
    active.for_each_set([&](std::size_t i) { subset.push_back(rules_.at(i)); });
    return predicate_stratify(RuleSet(std::move(subset)));
}

std::vector<Instance> GroundEngine::stable_models(const Bitset& active, std::size_t limit) const {
    if (cfg_.backend == EngineConfig::Backend::External) {
        if (!cfg_.external_solver)
            throw EngineError(EngineError::Kind::ExternalBackend,
                              "external backend selected but no solver is configured");
        std::vector<NormalRule> subset;
        active.for_each_set([&](std::size_t i) { subset.push_back(skolemized_[i]); });
        std::vector<Instance> models = cfg_.external_solver->stable_models(db_, subset, limit);
        std::vector<Instance> kept;
        for (Instance& m : models)
            if (!m.contains(Atom::falsum())) kept.push_back(std::move(m));
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        return kept;
    }
    return native_models(active, limit);
}

bool GroundEngine::has_stable_model(const Bitset& active) const {
    return !stable_models(active, 1).empty();
}

std::vector<Instance> GroundEngine::native_models(const Bitset& active, std::size_t limit) const {
    auto strata = strata_for(active);
    if (strata) return stratified_models(active, *strata);
    return branching_models(active, limit);
}

// Perfect-model evaluation: strata in ascending level order, negation
// only consults strictly lower strata. At most one stable model exists.
std::vector<Instance> GroundEngine::stratified_models(
    const Bitset& active, const std::map<std::string, int>& levels) const {
    // Bucket active rule instances by head stratum.
    std::map<int, std::vector<std::uint32_t>> buckets;
    std::vector<std::uint32_t> all_active;
    for (std::size_t r = 0; r < ground_.rules().size(); ++r) {
        const GroundRule& gr = ground_.rules()[r];
        if (!active.test(gr.rule_index)) continue;
        all_active.push_back(static_cast<std::uint32_t>(r));
        auto it = levels.find(ground_.atom(gr.head).predicate());
        int level = it == levels.end() ? 0 : it->second;
        buckets[level].push_back(static_cast<std::uint32_t>(r));
    }

    Runner runner(ground_, watch_);
    Bitset truth(ground_.atom_count());
    for (AtomId a : ground_.base_facts()) truth.set(a);
    for (const auto& [level, rule_ids] : buckets) runner.run(rule_ids, truth, truth);

    // Reduct test, as for any candidate.
    Bitset check(ground_.atom_count());
    for (AtomId a : ground_.base_facts()) check.set(a);
    runner.run(all_active, check, truth);
    if (check != truth)
        throw std::logic_error("stratified evaluation produced a non-stable candidate");

    if (ground_.falsum_id() && truth.test(*ground_.falsum_id())) return {};
    return {ground_.to_instance(truth)};
}

// Assumption branching over the negated ground atoms of the active
// rules: guess A, reduce, take the least model M, keep M when the
// guess reproduces itself (M n negs = A and M is the least model of
// its own reduct).
std::vector<Instance> GroundEngine::branching_models(const Bitset& active,
                                                     std::size_t limit) const {
    std::vector<std::uint32_t> active_rules;
    std::vector<AtomId> negs;
    {
        Bitset neg_seen(ground_.atom_count());
        for (std::size_t r = 0; r < ground_.rules().size(); ++r) {
            const GroundRule& gr = ground_.rules()[r];
            if (!active.test(gr.rule_index)) continue;
            active_rules.push_back(static_cast<std::uint32_t>(r));
            for (AtomId a : gr.body_neg)
                if (!neg_seen.test(a)) {
                    neg_seen.set(a);
                    negs.push_back(a);
                }
        }
        std::sort(negs.begin(), negs.end());
    }

    if (negs.size() > cfg_.max_neg_branch || negs.size() > 63)
        throw EngineError(EngineError::Kind::NegBranchLimit,
                          "the grounding has " + std::to_string(negs.size()) +
                              " negated ground atoms, above the branching bound of " +
                              std::to_string(std::min<std::size_t>(cfg_.max_neg_branch, 63)) +
                              "; consider the external backend");

    Runner runner(ground_, watch_);
    std::vector<Instance> models;
    const std::uint64_t total = 1ULL << negs.size();
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        Bitset assumed(ground_.atom_count());
        for (std::size_t i = 0; i < negs.size(); ++i)
            if (bits & (1ULL << i)) assumed.set(negs[i]);

        Bitset truth(ground_.atom_count());
        for (AtomId a : ground_.base_facts()) truth.set(a);
        runner.run(active_rules, truth, assumed);

        // The guess must reproduce itself on the negated atoms.
        bool matches = true;
        for (std::size_t i = 0; i < negs.size(); ++i)
            if (truth.test(negs[i]) != ((bits >> i) & 1ULL)) {
                matches = false;
                break;
            }
        if (!matches) continue;

        // Definitive stability test: M = least model of the reduct wrt M.
        Bitset check(ground_.atom_count());
        for (AtomId a : ground_.base_facts()) check.set(a);
        runner.run(active_rules, check, truth);
        if (check != truth) continue;

        if (ground_.falsum_id() && truth.test(*ground_.falsum_id())) continue;
        models.push_back(ground_.to_instance(truth));
        if (limit && models.size() >= limit) break;
    }
    std::sort(models.begin(), models.end());
    return models;
}

// ---------------------------------------------------------------------------
// One-shot entry points

std::vector<Instance> stable_models(const Database& db, const RuleSet& rules,
                                    const EngineConfig& cfg) {
    GroundEngine engine(db, rules, cfg);
    return engine.stable_models(Bitset::full(rules.size()));
}

bool is_consistent(const Database& db, const RuleSet& rules, const EngineConfig& cfg) {
    GroundEngine engine(db, rules, cfg);
    return engine.has_stable_model(Bitset::full(rules.size()));
}

}  // namespace repairqa
