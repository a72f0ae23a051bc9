#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repairqa/core.hpp"
#include "repairqa/engine.hpp"

namespace repairqa {

struct SolverConfig {
    std::string executable;
    std::vector<std::string> extra_args;
    std::size_t model_limit = 0;  // 0 = all models
    double timeout_seconds = 60.0;

    void validate() const;
};

class SolverError : public std::runtime_error {
public:
    enum class Kind { Collision, Spawn, Parse, Timeout };
    SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
    Kind kind;
};

// Bidirectional identifier normalization between the surface language
// and the ASP format: predicates and constants get a lower-case first
// letter, variables an upper-case one. Two source names mapping to the
// same target raise a collision error.
class MangleTable {
public:
    std::string predicate(const std::string& name);
    std::string constant(const std::string& name);
    std::string skolem_fn(const SkolemId& id);

    std::optional<std::string> demangle_predicate(const std::string& asp_name) const;
    std::optional<std::string> demangle_constant(const std::string& asp_name) const;
    std::optional<SkolemId> demangle_skolem(const std::string& asp_name) const;

private:
    std::string intern(const std::string& name, bool lower, std::map<std::string, std::string>& fwd,
                       std::map<std::string, std::string>& rev, const char* what);

    std::map<std::string, std::string> pred_fwd_, pred_rev_;
    std::map<std::string, std::string> const_fwd_, const_rev_;
    std::map<std::string, SkolemId> skolem_rev_;
    std::map<std::string, std::string> skolem_fwd_;  // keyed by id.to_string()
};

struct AspProgram {
    std::string text;
    MangleTable table;
};

// Facts as `pred(args).`, rules as `head :- body.` (heads split per
// atom), constraints as `:- body.`, skolem terms as function terms.
AspProgram emit_asp(const Database& db, const std::vector<NormalRule>& rules);

enum class SolveStatus { Satisfiable, Unsatisfiable, Timeout };

struct SolveResult {
    SolveStatus status;
    std::vector<Instance> models;
};

// Runs the solver on the program (written to a temporary file) and
// parses the answer sets back. Unsatisfiable yields an empty model
// set; hitting the timeout is reported distinctly.
SolveResult solve_external(const AspProgram& program, const SolverConfig& cfg);

// Parses clasp/clingo-style output: each `Answer: N` line is followed
// by one line of space-separated atoms; a SATISFIABLE / UNSATISFIABLE
// marker closes the run.
std::vector<Instance> parse_answer_sets(const std::string& output, const MangleTable& table);

// Adapter plugging the bridge into EngineConfig::external_solver. A
// solver timeout surfaces as an error, never as inconsistency.
class ExternalSolverBackend : public SolverHook {
public:
    explicit ExternalSolverBackend(SolverConfig cfg);
    std::vector<Instance> stable_models(const Database& db, const std::vector<NormalRule>& rules,
                                        std::size_t limit) override;

private:
    SolverConfig cfg_;
};

}  // namespace repairqa
