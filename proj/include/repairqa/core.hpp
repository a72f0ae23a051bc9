#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace repairqa {

// Thrown when a vocabulary value would violate one of its construction
// invariants (rule safety, ground databases, reserved predicates, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class UnboundVariableError : public DomainError {
public:
    explicit UnboundVariableError(const std::string& var)
        : DomainError("unbound variable: " + var), variable(var) {}
    std::string variable;
};

// Identifier of a skolem function: one fresh function per
// (rule label, existential variable) pair, so skolemization is
// injective across rules.
struct SkolemId {
    std::string rule_label;
    std::string var_name;

    bool operator==(const SkolemId& o) const {
        return rule_label == o.rule_label && var_name == o.var_name;
    }
    bool operator<(const SkolemId& o) const {
        if (rule_label != o.rule_label) return rule_label < o.rule_label;
        return var_name < o.var_name;
    }
    std::string to_string() const { return "f_" + rule_label + "_" + var_name; }
};

class Term;
using TermList = std::vector<Term>;

// A first-order term: a data constant, a variable, or a skolem term
// (a null). Immutable; copies share the underlying node.
class Term {
public:
    enum class Kind : std::uint8_t { Constant, Variable, Skolem };

    static Term constant(std::string name);
    static Term variable(std::string name);
    static Term skolem(SkolemId fn, TermList args);

    Kind kind() const { return rep_->kind; }
    bool is_constant() const { return rep_->kind == Kind::Constant; }
    bool is_variable() const { return rep_->kind == Kind::Variable; }
    bool is_skolem() const { return rep_->kind == Kind::Skolem; }

    // Name of a constant or variable. Not meaningful for skolem terms.
    const std::string& name() const { return rep_->name; }
    const SkolemId& skolem_fn() const { return rep_->fn; }
    const TermList& skolem_args() const { return rep_->args; }

    bool is_ground() const { return rep_->ground; }
    // Nesting depth of skolem functions; 0 for constants and variables.
    int depth() const { return rep_->depth; }

    std::size_t hash() const { return rep_->hash; }
    bool operator==(const Term& o) const;
    bool operator!=(const Term& o) const { return !(*this == o); }
    bool operator<(const Term& o) const;

    std::string to_string() const;

private:
    struct Rep {
        Kind kind;
        std::string name;  // constant / variable
        SkolemId fn;       // skolem
        TermList args;     // skolem
        bool ground;
        int depth;
        std::size_t hash;
    };
    explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
    std::shared_ptr<const Rep> rep_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

// Name of the reserved 0-ary "false" predicate used as the head of
// constraints. It may never occur in a database or a rule body.
inline const std::string kFalsumPredicate = "bottom";

class Atom {
public:
    Atom(std::string predicate, TermList args);

    static const Atom& falsum();

    const std::string& predicate() const { return pred_; }
    const TermList& args() const { return args_; }
    std::size_t arity() const { return args_.size(); }
    bool is_falsum() const { return pred_ == kFalsumPredicate; }

    bool is_ground() const;
    int depth() const;  // max term depth
    void collect_variables(std::vector<std::string>& out) const;
    std::vector<std::string> variables() const;

    std::size_t hash() const { return hash_; }
    bool operator==(const Atom& o) const;
    bool operator!=(const Atom& o) const { return !(*this == o); }
    bool operator<(const Atom& o) const;

    std::string to_string() const;

private:
    std::string pred_;
    TermList args_;
    std::size_t hash_;
};

struct AtomHash {
    std::size_t operator()(const Atom& a) const { return a.hash(); }
};

using AtomList = std::vector<Atom>;

// Variable assignment used by matching and substitution.
class Binding {
public:
    Binding() = default;

    const Term* lookup(const std::string& var) const;
    bool bind(const std::string& var, const Term& t);  // false on conflicting rebind
    bool empty() const { return map_.empty(); }
    std::size_t size() const { return map_.size(); }

    const std::map<std::string, Term>& entries() const { return map_; }

private:
    std::map<std::string, Term> map_;
};

// Extends `binding` so that `pattern` maps onto the ground `fact`.
// Returns the unique minimal extension, or nullopt if none exists.
std::optional<Binding> match_atom(const Atom& pattern, const Atom& fact,
                                  const Binding& binding = Binding());

// Homomorphic replacement of variables. With require_ground, every
// variable of the expression must be bound or UnboundVariableError is
// thrown; otherwise unbound variables are left in place.
Term apply_substitution(const Term& t, const Binding& binding, bool require_ground = false);
Atom apply_substitution(const Atom& a, const Binding& binding, bool require_ground = false);
AtomList apply_substitution(const AtomList& atoms, const Binding& binding,
                            bool require_ground = false);

// A normal existential rule  body_pos, not body_neg -> exists Z . head.
// Constraints have the single head atom `bottom` and no existential
// variables. Construction enforces safety: every universal variable
// occurs in at least one positive body atom, and existential variables
// occur only in the head.
class Rule {
public:
    Rule(std::string label, AtomList body_pos, AtomList body_neg, AtomList head,
         std::vector<std::string> exist_vars);

    const std::string& label() const { return label_; }
    const AtomList& body_pos() const { return body_pos_; }
    const AtomList& body_neg() const { return body_neg_; }
    const AtomList& head() const { return head_; }
    const std::vector<std::string>& exist_vars() const { return exist_vars_; }
    const std::vector<std::string>& univ_vars() const { return univ_vars_; }
    // Universal variables occurring in the head, in order of first
    // occurrence there; these are the skolem function arguments.
    const std::vector<std::string>& frontier_vars() const { return frontier_vars_; }

    bool is_constraint() const;
    bool has_existentials() const { return !exist_vars_.empty(); }
    bool has_negation() const { return !body_neg_.empty(); }

    // The head with each existential variable z replaced by the skolem
    // term f_<label>_<z>(frontier).
    AtomList skolemized_head() const;

    // Same rule with every variable renamed through `rename` (must be
    // injective on the rule's variables) and the label replaced.
    Rule renamed(const std::string& new_label,
                 const std::map<std::string, std::string>& rename) const;

    std::string to_string() const;

private:
    std::string label_;
    AtomList body_pos_;
    AtomList body_neg_;
    AtomList head_;
    std::vector<std::string> exist_vars_;
    std::vector<std::string> univ_vars_;
    std::vector<std::string> frontier_vars_;
};

// A finite, labeled normal rule set with deterministic iteration order.
class RuleSet {
public:
    RuleSet() = default;
    explicit RuleSet(std::vector<Rule> rules);

    std::size_t size() const { return rules_.size(); }
    bool empty() const { return rules_.empty(); }
    const Rule& at(std::size_t i) const { return rules_.at(i); }
    const std::vector<Rule>& rules() const { return rules_; }

    bool has_label(const std::string& label) const;
    std::size_t index_of(const std::string& label) const;  // throws DomainError
    const Rule& by_label(const std::string& label) const;

    std::vector<std::string> labels() const;

    auto begin() const { return rules_.begin(); }
    auto end() const { return rules_.end(); }

private:
    std::vector<Rule> rules_;
    std::map<std::string, std::size_t> index_;
};

// A finite set of ground facts over constants only.
class Database {
public:
    Database() = default;
    explicit Database(AtomList facts);

    const AtomList& facts() const { return facts_; }  // sorted, duplicate-free
    std::size_t size() const { return facts_.size(); }
    bool contains(const Atom& a) const;

    bool operator==(const Database& o) const { return facts_ == o.facts_; }

    auto begin() const { return facts_.begin(); }
    auto end() const { return facts_.end(); }

private:
    AtomList facts_;
};

// A set of ground atoms; skolem terms allowed. Extensional: equality
// depends only on the atom set.
class Instance {
public:
    Instance() = default;
    explicit Instance(AtomList atoms);

    const AtomList& atoms() const { return atoms_; }  // sorted, duplicate-free
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    bool contains(const Atom& a) const;

    bool operator==(const Instance& o) const { return atoms_ == o.atoms_; }
    bool operator!=(const Instance& o) const { return !(*this == o); }
    bool operator<(const Instance& o) const { return atoms_ < o.atoms_; }

    auto begin() const { return atoms_.begin(); }
    auto end() const { return atoms_.end(); }

    std::string to_string() const;

private:
    AtomList atoms_;
};

// A normal Boolean conjunctive query: existentially closed conjunction
// of atoms (pos) and negated atoms (neg), with no skolem terms.
class Query {
public:
    Query() = default;
    Query(AtomList pos, AtomList neg);

    const AtomList& pos() const { return pos_; }
    const AtomList& neg() const { return neg_; }
    bool empty() const { return pos_.empty() && neg_.empty(); }

    std::string to_string() const;

private:
    AtomList pos_;
    AtomList neg_;
};

enum class PrefKind { Subset, Cardinality, PrioSubset, PrioCardinality, Weight };

const char* pref_kind_name(PrefKind k);
std::optional<PrefKind> pref_kind_from_name(const std::string& name);

// Parameters of one of the five preference preorders. Prioritization
// levels are required for the prio-* kinds and must partition the rule
// labels; weights must be >= 1 (weight 0 would let a rule be dropped
// from a weight repair without penalty, breaking maximality).
struct PreferenceSpec {
    PrefKind kind = PrefKind::Subset;
    std::vector<std::vector<std::string>> priority_levels;
    std::map<std::string, std::int64_t> weights;

    static PreferenceSpec subset() { return {PrefKind::Subset, {}, {}}; }
    static PreferenceSpec cardinality() { return {PrefKind::Cardinality, {}, {}}; }
};

// The result of a repair search: every preferred repair (as a label
// set, in the rule set's label order) with one stable-model witness.
struct RepairSet {
    PreferenceSpec preference;
    std::vector<std::vector<std::string>> repairs;
    std::vector<Instance> witnesses;  // parallel to `repairs`
};

std::size_t hash_combine(std::size_t seed, std::size_t v);

}  // namespace repairqa
