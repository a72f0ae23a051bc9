#include "repairqa/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace repairqa {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

// ---------------------------------------------------------------------------
// Term

Term Term::constant(std::string name) {
    if (name.empty()) throw DomainError("constant with empty name");
    auto rep = std::make_shared<Rep>();
    rep->kind = Kind::Constant;
    rep->name = std::move(name);
    rep->ground = true;
    rep->depth = 0;
    rep->hash = hash_combine(0x11, std::hash<std::string>{}(rep->name));
    return Term(std::move(rep));
}

Term Term::variable(std::string name) {
    if (name.empty()) throw DomainError("variable with empty name");
    auto rep = std::make_shared<Rep>();
    rep->kind = Kind::Variable;
    rep->name = std::move(name);
    rep->ground = false;
    rep->depth = 0;
    rep->hash = hash_combine(0x22, std::hash<std::string>{}(rep->name));
    return Term(std::move(rep));
}

Term Term::skolem(SkolemId fn, TermList args) {
    auto rep = std::make_shared<Rep>();
    rep->kind = Kind::Skolem;
    rep->fn = std::move(fn);
    rep->args = std::move(args);
    rep->ground = true;
    int max_child = 0;
    std::size_t h = hash_combine(0x33, std::hash<std::string>{}(rep->fn.rule_label));
    h = hash_combine(h, std::hash<std::string>{}(rep->fn.var_name));
    for (const Term& a : rep->args) {
        rep->ground = rep->ground && a.is_ground();
        max_child = std::max(max_child, a.depth());
        h = hash_combine(h, a.hash());
    }
    rep->depth = 1 + max_child;
    rep->hash = h;
    return Term(std::move(rep));
}

bool Term::operator==(const Term& o) const {
    if (rep_ == o.rep_) return true;
    if (rep_->kind != o.rep_->kind || rep_->hash != o.rep_->hash) return false;
    switch (rep_->kind) {
        case Kind::Constant:
        case Kind::Variable:
            return rep_->name == o.rep_->name;
        case Kind::Skolem:
            return rep_->fn == o.rep_->fn && rep_->args == o.rep_->args;
    }
    return false;
}

bool Term::operator<(const Term& o) const {
    if (rep_ == o.rep_) return false;
    if (rep_->kind != o.rep_->kind) return rep_->kind < o.rep_->kind;
    switch (rep_->kind) {
        case Kind::Constant:
        case Kind::Variable:
            return rep_->name < o.rep_->name;
        case Kind::Skolem:
            if (!(rep_->fn == o.rep_->fn)) return rep_->fn < o.rep_->fn;
            return std::lexicographical_compare(rep_->args.begin(), rep_->args.end(),
                                                o.rep_->args.begin(), o.rep_->args.end());
    }
    return false;
}

std::string Term::to_string() const {
    switch (rep_->kind) {
        case Kind::Constant:
        case Kind::Variable:
            return rep_->name;
        case Kind::Skolem: {
            std::string s = rep_->fn.to_string();
            s += '(';
            for (std::size_t i = 0; i < rep_->args.size(); ++i) {
                if (i) s += ',';
                s += rep_->args[i].to_string();
            }
            s += ')';
            return s;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Atom

Atom::Atom(std::string predicate, TermList args)
    : pred_(std::move(predicate)), args_(std::move(args)) {
    if (pred_.empty()) throw DomainError("atom with empty predicate name");
    if (pred_ == kFalsumPredicate && !args_.empty())
        throw DomainError("the reserved predicate '" + kFalsumPredicate + "' is 0-ary");
    std::size_t h = std::hash<std::string>{}(pred_);
    h = hash_combine(h, args_.size());
    for (const Term& t : args_) h = hash_combine(h, t.hash());
    hash_ = h;
}

const Atom& Atom::falsum() {
    static const Atom a(kFalsumPredicate, {});
    return a;
}

bool Atom::is_ground() const {
    for (const Term& t : args_)
        if (!t.is_ground()) return false;
    return true;
}

int Atom::depth() const {
    int d = 0;
    for (const Term& t : args_) d = std::max(d, t.depth());
    return d;
}

namespace {
void collect_term_variables(const Term& t, std::vector<std::string>& out) {
    if (t.is_variable()) {
        out.push_back(t.name());
    } else if (t.is_skolem()) {
        for (const Term& a : t.skolem_args()) collect_term_variables(a, out);
    }
}
}  // namespace

void Atom::collect_variables(std::vector<std::string>& out) const {
    for (const Term& t : args_) collect_term_variables(t, out);
}

std::vector<std::string> Atom::variables() const {
    std::vector<std::string> out;
    collect_variables(out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Atom::operator==(const Atom& o) const {
    return hash_ == o.hash_ && pred_ == o.pred_ && args_ == o.args_;
}

bool Atom::operator<(const Atom& o) const {
    if (pred_ != o.pred_) return pred_ < o.pred_;
    return std::lexicographical_compare(args_.begin(), args_.end(), o.args_.begin(),
                                        o.args_.end());
}

std::string Atom::to_string() const {
    if (args_.empty()) return pred_;
    std::string s = pred_;
    s += '(';
    for (std::size_t i = 0; i < args_.size(); ++i) {
        if (i) s += ',';
        s += args_[i].to_string();
    }
    s += ')';
    return s;
}

// ---------------------------------------------------------------------------
// Binding, matching, substitution

const Term* Binding::lookup(const std::string& var) const {
    auto it = map_.find(var);
    return it == map_.end() ? nullptr : &it->second;
}

bool Binding::bind(const std::string& var, const Term& t) {
    auto [it, inserted] = map_.emplace(var, t);
    return inserted || it->second == t;
}

namespace {
bool match_term(const Term& pattern, const Term& value, Binding& b) {
    switch (pattern.kind()) {
        case Term::Kind::Variable:
            return b.bind(pattern.name(), value);
        case Term::Kind::Constant:
            return pattern == value;
        case Term::Kind::Skolem: {
            if (!value.is_skolem() || !(pattern.skolem_fn() == value.skolem_fn()) ||
                pattern.skolem_args().size() != value.skolem_args().size())
                return false;
            for (std::size_t i = 0; i < pattern.skolem_args().size(); ++i)
                if (!match_term(pattern.skolem_args()[i], value.skolem_args()[i], b))
                    return false;
            return true;
        }
    }
    return false;
}
}  // namespace

std::optional<Binding> match_atom(const Atom& pattern, const Atom& fact,
                                  const Binding& binding) {
    if (pattern.predicate() != fact.predicate() || pattern.arity() != fact.arity())
        return std::nullopt;
    Binding b = binding;
    for (std::size_t i = 0; i < pattern.arity(); ++i)
        if (!match_term(pattern.args()[i], fact.args()[i], b)) return std::nullopt;
    return b;
}

Term apply_substitution(const Term& t, const Binding& binding, bool require_ground) {
    switch (t.kind()) {
        case Term::Kind::Constant:
            return t;
        case Term::Kind::Variable: {
            const Term* bound = binding.lookup(t.name());
            if (bound) return *bound;
            if (require_ground) throw UnboundVariableError(t.name());
            return t;
        }
        case Term::Kind::Skolem: {
            if (t.is_ground()) return t;
            TermList args;
            args.reserve(t.skolem_args().size());
            for (const Term& a : t.skolem_args())
                args.push_back(apply_substitution(a, binding, require_ground));
            return Term::skolem(t.skolem_fn(), std::move(args));
        }
    }
    return t;
}

Atom apply_substitution(const Atom& a, const Binding& binding, bool require_ground) {
    if (a.is_ground()) return a;
    TermList args;
    args.reserve(a.arity());
    for (const Term& t : a.args()) args.push_back(apply_substitution(t, binding, require_ground));
    return Atom(a.predicate(), std::move(args));
}

AtomList apply_substitution(const AtomList& atoms, const Binding& binding,
                            bool require_ground) {
    AtomList out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) out.push_back(apply_substitution(a, binding, require_ground));
    return out;
}

// ---------------------------------------------------------------------------
// Rule

namespace {
AtomList dedupe_atoms(AtomList atoms) {
    AtomList out;
    out.reserve(atoms.size());
    for (Atom& a : atoms) {
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
    }
    return out;
}
}  // namespace

Rule::Rule(std::string label, AtomList body_pos, AtomList body_neg, AtomList head,
           std::vector<std::string> exist_vars)
    : label_(std::move(label)),
      body_pos_(dedupe_atoms(std::move(body_pos))),
      body_neg_(dedupe_atoms(std::move(body_neg))),
      head_(dedupe_atoms(std::move(head))),
      exist_vars_(std::move(exist_vars)) {
    if (label_.empty()) throw DomainError("rule with empty label");
    if (head_.empty()) throw DomainError("rule '" + label_ + "' has an empty head");

    for (const Atom& a : head_) {
        if (a.is_falsum() && head_.size() != 1)
            throw DomainError("rule '" + label_ + "': '" + kFalsumPredicate +
                              "' must be the only head atom");
    }
    for (const Atom& a : body_pos_)
        if (a.is_falsum())
            throw DomainError("rule '" + label_ + "': '" + kFalsumPredicate +
                              "' cannot occur in a body");
    for (const Atom& a : body_neg_)
        if (a.is_falsum())
            throw DomainError("rule '" + label_ + "': '" + kFalsumPredicate +
                              "' cannot occur in a body");

    std::set<std::string> exist(exist_vars_.begin(), exist_vars_.end());
    if (exist.size() != exist_vars_.size())
        throw DomainError("rule '" + label_ + "': duplicate existential variable");
    if (is_constraint() && !exist.empty())
        throw DomainError("constraint '" + label_ + "' cannot have existential variables");

    std::vector<std::string> pos_vars;
    for (const Atom& a : body_pos_) a.collect_variables(pos_vars);
    std::set<std::string> pos(pos_vars.begin(), pos_vars.end());

    for (const std::string& v : exist)
        if (pos.count(v))
            throw DomainError("rule '" + label_ + "': existential variable '" + v +
                              "' occurs in the body");
    for (const Atom& a : body_neg_)
        for (const std::string& v : a.variables()) {
            if (exist.count(v))
                throw DomainError("rule '" + label_ + "': existential variable '" + v +
                                  "' occurs in the body");
            if (!pos.count(v))
                throw DomainError("rule '" + label_ + "': unsafe variable '" + v +
                                  "' (no positive body occurrence)");
        }

    // Universal variables in order of first occurrence: body_pos, body_neg, head.
    std::set<std::string> seen;
    auto add_univ = [&](const std::vector<std::string>& vars) {
        for (const std::string& v : vars)
            if (!exist.count(v) && seen.insert(v).second) univ_vars_.push_back(v);
    };
    std::vector<std::string> tmp;
    for (const Atom& a : body_pos_) a.collect_variables(tmp);
    add_univ(tmp);
    tmp.clear();
    for (const Atom& a : body_neg_) a.collect_variables(tmp);
    add_univ(tmp);
    tmp.clear();
    for (const Atom& a : head_) a.collect_variables(tmp);
    add_univ(tmp);

    for (const std::string& v : univ_vars_)
        if (!pos.count(v))
            throw DomainError("rule '" + label_ + "': unsafe variable '" + v +
                              "' (no positive body occurrence)");

    // Head-frontier variables in order of first occurrence in the head.
    std::set<std::string> fseen;
    for (const Atom& a : head_) {
        std::vector<std::string> hv;
        a.collect_variables(hv);
        for (const std::string& v : hv)
            if (!exist.count(v) && fseen.insert(v).second) frontier_vars_.push_back(v);
    }
}

bool Rule::is_constraint() const {
    return head_.size() == 1 && head_[0].is_falsum();
}

AtomList Rule::skolemized_head() const {
    if (exist_vars_.empty()) return head_;
    TermList frontier;
    frontier.reserve(frontier_vars_.size());
    for (const std::string& v : frontier_vars_) frontier.push_back(Term::variable(v));
    Binding b;
    for (const std::string& z : exist_vars_)
        b.bind(z, Term::skolem(SkolemId{label_, z}, frontier));
    return apply_substitution(head_, b);
}

Rule Rule::renamed(const std::string& new_label,
                   const std::map<std::string, std::string>& rename) const {
    Binding b;
    for (const auto& [from, to] : rename) b.bind(from, Term::variable(to));
    std::vector<std::string> ex;
    ex.reserve(exist_vars_.size());
    for (const std::string& z : exist_vars_) {
        auto it = rename.find(z);
        ex.push_back(it == rename.end() ? z : it->second);
    }
    return Rule(new_label, apply_substitution(body_pos_, b), apply_substitution(body_neg_, b),
                apply_substitution(head_, b), std::move(ex));
}

std::string Rule::to_string() const {
    std::ostringstream os;
    os << label_ << ": ";
    bool first = true;
    for (const Atom& a : body_pos_) {
        if (!first) os << ", ";
        os << a.to_string();
        first = false;
    }
    for (const Atom& a : body_neg_) {
        if (!first) os << ", ";
        os << "not " << a.to_string();
        first = false;
    }
    if (!first) os << " ";
    os << "-> ";
    if (is_constraint()) {
        os << kFalsumPredicate;
    } else {
        if (!exist_vars_.empty()) {
            os << "exists ";
            for (std::size_t i = 0; i < exist_vars_.size(); ++i) {
                if (i) os << ", ";
                os << exist_vars_[i];
            }
            os << " . ";
        }
        for (std::size_t i = 0; i < head_.size(); ++i) {
            if (i) os << ", ";
            os << head_[i].to_string();
        }
    }
    os << ".";
    return os.str();
}

// ---------------------------------------------------------------------------
// RuleSet

RuleSet::RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        auto [it, inserted] = index_.emplace(rules_[i].label(), i);
        if (!inserted) throw DomainError("duplicate rule label '" + rules_[i].label() + "'");
    }
}

bool RuleSet::has_label(const std::string& label) const { return index_.count(label) > 0; }

std::size_t RuleSet::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw DomainError("unknown rule label '" + label + "'");
    return it->second;
}

const Rule& RuleSet::by_label(const std::string& label) const { return rules_[index_of(label)]; }

std::vector<std::string> RuleSet::labels() const {
    std::vector<std::string> out;
    out.reserve(rules_.size());
    for (const Rule& r : rules_) out.push_back(r.label());
    return out;
}

// ---------------------------------------------------------------------------
// Database, Instance, Query

namespace {
AtomList sorted_unique(AtomList atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms;
}

bool contains_skolem(const Atom& a) {
    for (const Term& t : a.args())
        if (t.depth() > 0 || t.is_skolem()) return true;
    return false;
}
}  // namespace

Database::Database(AtomList facts) : facts_(sorted_unique(std::move(facts))) {
    for (const Atom& a : facts_) {
        if (a.is_falsum())
            throw DomainError("the reserved predicate '" + kFalsumPredicate +
                              "' cannot occur in a database");
        if (!a.is_ground())
            throw DomainError("non-ground fact in database: " + a.to_string());
        if (contains_skolem(a))
            throw DomainError("database fact involves a null: " + a.to_string());
    }
}

bool Database::contains(const Atom& a) const {
    return std::binary_search(facts_.begin(), facts_.end(), a);
}

Instance::Instance(AtomList atoms) : atoms_(sorted_unique(std::move(atoms))) {
    for (const Atom& a : atoms_)
        if (!a.is_ground())
            throw DomainError("non-ground atom in instance: " + a.to_string());
}

bool Instance::contains(const Atom& a) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

std::string Instance::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) s += ", ";
        s += atoms_[i].to_string();
    }
    s += "}";
    return s;
}

Query::Query(AtomList pos, AtomList neg)
    : pos_(dedupe_atoms(std::move(pos))), neg_(dedupe_atoms(std::move(neg))) {
    for (const AtomList* part : {&pos_, &neg_})
        for (const Atom& a : *part) {
            if (a.is_falsum())
                throw DomainError("query uses the reserved predicate '" + kFalsumPredicate + "'");
            if (contains_skolem(a))
                throw DomainError("query involves a null: " + a.to_string());
        }
}

std::string Query::to_string() const {
    std::string s = "?";
    bool first = true;
    for (const Atom& a : pos_) {
        s += first ? " " : ", ";
        s += a.to_string();
        first = false;
    }
    for (const Atom& a : neg_) {
        s += first ? " not " : ", not ";
        s += a.to_string();
        first = false;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Preference kinds

const char* pref_kind_name(PrefKind k) {
    switch (k) {
        case PrefKind::Subset: return "subset";
        case PrefKind::Cardinality: return "card";
        case PrefKind::PrioSubset: return "prio-subset";
        case PrefKind::PrioCardinality: return "prio-card";
        case PrefKind::Weight: return "weight";
    }
    return "?";
}

std::optional<PrefKind> pref_kind_from_name(const std::string& name) {
    if (name == "subset") return PrefKind::Subset;
    if (name == "card" || name == "cardinality") return PrefKind::Cardinality;
    if (name == "prio-subset") return PrefKind::PrioSubset;
    if (name == "prio-card" || name == "prio-cardinality") return PrefKind::PrioCardinality;
    if (name == "weight") return PrefKind::Weight;
    return std::nullopt;
}

}  // namespace repairqa
