#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "repairqa/bitset.hpp"
#include "repairqa/core.hpp"

namespace repairqa {

// A skolemized normal rule: negation written as `not`, existential head
// variables replaced by skolem terms. The body is untouched by
// skolemization, so it never contains skolem terms.
struct NormalRule {
    std::string label;
    AtomList head;
    AtomList body_pos;
    AtomList body_neg;

    std::string to_string() const;
};

NormalRule skolemize(const Rule& rule);
std::vector<NormalRule> skolemize(const RuleSet& rules);

class EngineError : public std::runtime_error {
public:
    enum class Kind {
        DepthLimit,       // skolem chain exceeded max_skolem_depth
        AtomCap,          // grounding exceeded max_ground_atoms
        NegBranchLimit,   // too many negated ground atoms to branch on
        ExternalBackend,  // external backend requested but not configured
    };
    EngineError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
    Kind kind;
};

class SolverHook;

struct EngineConfig {
    int max_skolem_depth = 8;
    std::size_t max_ground_atoms = 1000000;
    std::size_t max_neg_branch = 20;

    enum class Backend { Native, External };
    Backend backend = Backend::Native;
    std::shared_ptr<SolverHook> external_solver;

    // Forces the assumption-branching path even for stratifiable rule
    // sets; used to cross-check the two evaluation paths.
    bool disable_stratified_path = false;

    void validate() const;
};

// Interface the external ASP backend plugs into; implemented by
// solver_bridge. limit = 0 requests all models.
class SolverHook {
public:
    virtual ~SolverHook() = default;
    virtual std::vector<Instance> stable_models(const Database& db,
                                                const std::vector<NormalRule>& rules,
                                                std::size_t limit) = 0;
};

using AtomId = std::uint32_t;

// Instance of a skolemized rule with a single head atom; multi-atom
// heads are split into one GroundRule per head atom sharing the body.
// rule_index identifies the originating rule in the rule set.
struct GroundRule {
    AtomId head;
    std::vector<AtomId> body_pos;  // sorted, duplicate-free
    std::vector<AtomId> body_neg;  // sorted, duplicate-free
    std::uint32_t rule_index;
};

// The relevantly grounded program: every rule instance whose positive
// body lies inside the positive closure of the database (negative
// bodies ignored while chasing). The closure over-approximates every
// stable model, so none is lost by the restriction.
class GroundProgram {
public:
    std::size_t atom_count() const { return atoms_.size(); }
    const Atom& atom(AtomId id) const { return atoms_[id]; }
    std::optional<AtomId> find(const Atom& a) const;

    const std::vector<GroundRule>& rules() const { return rules_; }
    const std::vector<AtomId>& base_facts() const { return base_facts_; }
    // Atoms occurring in some negative body, ascending.
    const std::vector<AtomId>& neg_atoms() const { return neg_atoms_; }
    std::optional<AtomId> falsum_id() const { return falsum_; }

    Instance to_instance(const Bitset& member) const;
    // The positive closure: base facts plus every derived head atom.
    // Atoms with ids >= closure_count() occur only in negative bodies.
    Instance closure() const;
    std::size_t closure_count() const { return closure_count_; }

private:
    friend class Grounder;
    std::vector<Atom> atoms_;
    std::unordered_map<Atom, AtomId, AtomHash> intern_;
    std::vector<GroundRule> rules_;
    std::vector<AtomId> base_facts_;
    std::vector<AtomId> neg_atoms_;
    std::optional<AtomId> falsum_;
    std::size_t closure_count_ = 0;
};

GroundProgram ground_relevant(const std::vector<NormalRule>& rules, const Database& db,
                              const EngineConfig& cfg = EngineConfig());

struct PositiveGroundRule {
    AtomId head;
    std::vector<AtomId> body;
};

// The Gelfond-Lifschitz reduct: drop every rule whose negative body
// meets m, then strip the negative literals.
std::vector<PositiveGroundRule> gl_reduct(const GroundProgram& g, const Instance& m);

// Least set of atoms containing the base facts and closed under the
// positive rules.
Instance least_model(const GroundProgram& g, const std::vector<PositiveGroundRule>& rules);
Instance least_model(const GroundProgram& g, const std::vector<PositiveGroundRule>& rules,
                     const std::vector<AtomId>& base_facts);

// Grounds D u sk(Sigma) once and answers stable-model queries for any
// subset of Sigma against that shared grounding. Rule instances of
// inactive rules never fire, so per-subset answers coincide with
// grounding the subset directly.
class GroundEngine {
public:
    GroundEngine(Database db, RuleSet rules, EngineConfig cfg = EngineConfig());

    const GroundProgram& program() const { return ground_; }
    const RuleSet& rule_set() const { return rules_; }
    const Database& database() const { return db_; }
    const EngineConfig& config() const { return cfg_; }

    // Stable models of D u {rules in active}; limit = 0 means all,
    // limit = 1 is existence mode.
    std::vector<Instance> stable_models(const Bitset& active, std::size_t limit = 0) const;
    bool has_stable_model(const Bitset& active) const;

private:
    struct Eval;
    std::vector<Instance> native_models(const Bitset& active, std::size_t limit) const;
    std::vector<Instance> stratified_models(const Bitset& active,
                                            const std::map<std::string, int>& levels) const;
    std::vector<Instance> branching_models(const Bitset& active, std::size_t limit) const;
    std::optional<std::map<std::string, int>> strata_for(const Bitset& active) const;

    Database db_;
    RuleSet rules_;
    EngineConfig cfg_;
    std::vector<NormalRule> skolemized_;
    GroundProgram ground_;
    std::optional<std::map<std::string, int>> global_strata_;
    std::vector<std::vector<std::uint32_t>> watch_;  // atom -> watching rules
};

// One-shot forms over a single rule subset.
std::vector<Instance> stable_models(const Database& db, const RuleSet& rules,
                                    const EngineConfig& cfg = EngineConfig());
bool is_consistent(const Database& db, const RuleSet& rules,
                   const EngineConfig& cfg = EngineConfig());

}  // namespace repairqa
