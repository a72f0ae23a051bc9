#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "repairqa/analysis.hpp"
#include "repairqa/bench.hpp"
#include "repairqa/json_out.hpp"
#include "repairqa/parser.hpp"
#include "repairqa/query_eval.hpp"
#include "repairqa/repair.hpp"
#include "repairqa/solver_bridge.hpp"

namespace {

using namespace repairqa;

struct CommonOpts {
    std::string rules_path;
    std::string data_path;
    std::string pref_name = "subset";
    std::string backend = "native";
    std::string solver_path;
    std::vector<std::string> solver_args;
    double solver_timeout = 60.0;
    int max_depth = 8;
    std::size_t max_atoms = 1000000;
    std::size_t max_neg_branch = 20;
    std::size_t max_subset = 24;
    int jobs = 1;
    std::string format = "json";
    bool strict_classes = false;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

EngineConfig engine_config(const CommonOpts& opts) {
    EngineConfig cfg;
    cfg.max_skolem_depth = opts.max_depth;
    cfg.max_ground_atoms = opts.max_atoms;
    cfg.max_neg_branch = opts.max_neg_branch;
    if (opts.backend == "external") {
        if (opts.solver_path.empty())
            throw DomainError("--backend external needs --solver PATH");
        cfg.backend = EngineConfig::Backend::External;
        SolverConfig scfg;
        scfg.executable = opts.solver_path;
        scfg.extra_args = opts.solver_args;
        scfg.timeout_seconds = opts.solver_timeout;
        cfg.external_solver = std::make_shared<ExternalSolverBackend>(scfg);
    }
    return cfg;
}

// Predicates must keep one arity across the rule, database and query
// inputs; a mismatch would silently never match.
void check_schema(const RuleSet& rules, const Database* db, const Query* query) {
    std::map<std::string, std::size_t> arity;
    auto check = [&](const Atom& a, const std::string& where) {
        auto [it, inserted] = arity.emplace(a.predicate(), a.arity());
        if (!inserted && it->second != a.arity())
            throw DomainError("predicate '" + a.predicate() + "' used with arity " +
                              std::to_string(a.arity()) + " in the " + where +
                              " but with arity " + std::to_string(it->second) + " elsewhere");
    };
    for (const Rule& r : rules) {
        for (const Atom& a : r.body_pos()) check(a, "rules");
        for (const Atom& a : r.body_neg()) check(a, "rules");
        for (const Atom& a : r.head()) check(a, "rules");
    }
    if (db)
        for (const Atom& a : *db) check(a, "database");
    if (query) {
        for (const Atom& a : query->pos()) check(a, "query");
        for (const Atom& a : query->neg()) check(a, "query");
    }
}

SearchConfig search_config(const CommonOpts& opts) {
    SearchConfig cfg;
    cfg.max_subset_rules = opts.max_subset;
    cfg.jobs = opts.jobs;
    return cfg;
}

PreferenceSpec preference(const CommonOpts& opts, const ProgramDocument& doc) {
    auto kind = pref_kind_from_name(opts.pref_name);
    if (!kind) throw DomainError("unknown preference kind '" + opts.pref_name + "'");
    return doc.preference(*kind);
}

void add_engine_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--backend", opts.backend, "stable-model backend")
        ->check(CLI::IsMember({"native", "external"}));
    cmd->add_option("--solver", opts.solver_path, "external ASP solver executable");
    cmd->add_option("--solver-arg", opts.solver_args, "extra solver argument (repeatable)");
    cmd->add_option("--solver-timeout", opts.solver_timeout, "solver timeout in seconds");
    cmd->add_option("--max-depth", opts.max_depth, "skolem depth limit");
    cmd->add_option("--max-atoms", opts.max_atoms, "ground atom cap");
    cmd->add_option("--max-neg-branch", opts.max_neg_branch,
                    "max negated ground atoms for native branching");
    cmd->add_option("--max-subset", opts.max_subset, "subset search width guard");
    cmd->add_option("--jobs", opts.jobs, "concurrent consistency checks");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
}

int cmd_analyze(const CommonOpts& opts) {
    ProgramDocument doc = parse_program(read_file(opts.rules_path));
    ClassReport report = analyze(doc.rules);
    if (opts.format == "json") {
        std::cout << to_json(report).dump(2) << "\n";
    } else {
        std::cout << "r_acyclic: " << (report.r_acyclic ? "true" : "false") << "\n";
        std::cout << "r_stratified: " << (report.r_stratification ? "true" : "false");
        if (report.r_stratification) {
            std::cout << "  partition:";
            for (const auto& block : *report.r_stratification) {
                std::cout << " {";
                for (std::size_t i = 0; i < block.size(); ++i)
                    std::cout << (i ? "," : "") << block[i];
                std::cout << "}";
            }
        }
        std::cout << "\n";
        std::cout << "guarded: " << (report.guarded ? "true" : "false") << "\n";
        std::cout << "stratified: " << (report.stratification ? "true" : "false") << "\n";
    }
    return 0;
}

int cmd_repairs(const CommonOpts& opts) {
    ProgramDocument doc = parse_program(read_file(opts.rules_path));
    Database db = parse_database(read_file(opts.data_path));
    check_schema(doc.rules, &db, nullptr);
    PreferenceSpec pref = preference(opts, doc);

    GroundEngine engine(db, doc.rules, engine_config(opts));
    RepairSearch search(engine, search_config(opts));
    RepairSet repairs = search.preferred_repairs(pref);

    if (opts.format == "json") {
        std::cout << repair_set_jsonl(repairs);
    } else {
        for (std::size_t i = 0; i < repairs.repairs.size(); ++i) {
            std::cout << "repair {";
            for (std::size_t j = 0; j < repairs.repairs[i].size(); ++j)
                std::cout << (j ? "," : "") << repairs.repairs[i][j];
            std::cout << "}  witness " << repairs.witnesses[i].to_string() << "\n";
        }
    }
    return 0;
}

int cmd_query(const CommonOpts& opts, const std::string& query_text) {
    ProgramDocument doc = parse_program(read_file(opts.rules_path));
    Database db = parse_database(read_file(opts.data_path));
    Query q = parse_query(query_text);
    check_schema(doc.rules, &db, &q);
    PreferenceSpec pref = preference(opts, doc);

    CertainConfig cfg;
    cfg.engine = engine_config(opts);
    cfg.search = search_config(opts);
    cfg.strict_classes = opts.strict_classes;
    Verdict verdict = certain_answer(db, doc.rules, pref, q, cfg);

    if (opts.format == "json") {
        std::cout << to_json(verdict).dump(2) << "\n";
    } else {
        std::cout << (verdict.entailed ? "entailed" : "not entailed") << " ("
                  << verdict.repairs_examined << " repairs examined)\n";
        if (verdict.countermodel) {
            std::cout << "countermodel repair {";
            for (std::size_t j = 0; j < verdict.countermodel->repair.size(); ++j)
                std::cout << (j ? "," : "") << verdict.countermodel->repair[j];
            std::cout << "}\n";
        }
        for (const std::string& w : verdict.warnings) std::cout << "warning: " << w << "\n";
    }
    return verdict.entailed ? 0 : 1;
}

int cmd_bench(const CommonOpts& opts, std::size_t facts, std::size_t reliable,
              std::size_t unreliable, double subset_budget) {
    BenchSpec spec;
    spec.facts = facts;
    spec.reliable_rules = reliable;
    spec.unreliable_rules = unreliable;
    BenchInstance instance = make_bench_instance(spec);
    BenchResult result = run_bench(instance, engine_config(opts), search_config(opts),
                                   subset_budget);
    std::cout << bench_table({result});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"query answering over inconsistent existential rules via preferred rule repairs"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string query_text;
    std::size_t bench_facts = 10000, bench_reliable = 120, bench_unreliable = 3;
    double bench_subset_budget = 15.0;

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "reliance and class report");
    analyze_cmd->add_option("--rules", opts.rules_path, "rule file")->required();
    add_engine_flags(analyze_cmd, opts);

    CLI::App* repairs_cmd = app.add_subcommand("repairs", "enumerate preferred repairs");
    repairs_cmd->add_option("--rules", opts.rules_path, "rule file")->required();
    repairs_cmd->add_option("--data", opts.data_path, "database file")->required();
    repairs_cmd->add_option("--pref", opts.pref_name,
                            "preference kind: subset|card|prio-subset|prio-card|weight");
    add_engine_flags(repairs_cmd, opts);

    CLI::App* query_cmd = app.add_subcommand("query", "certain answer over preferred repairs");
    query_cmd->add_option("--rules", opts.rules_path, "rule file")->required();
    query_cmd->add_option("--data", opts.data_path, "database file")->required();
    query_cmd->add_option("--query", query_text, "query text, e.g. \"? Mammal(a)\"")->required();
    query_cmd->add_option("--pref", opts.pref_name,
                          "preference kind: subset|card|prio-subset|prio-card|weight");
    query_cmd->add_flag("--strict-classes", opts.strict_classes,
                        "reject non-covered queries on guarded sets with full negation");
    add_engine_flags(query_cmd, opts);

    CLI::App* bench_cmd = app.add_subcommand("bench", "synthetic repair-search benchmark");
    bench_cmd->add_option("--facts", bench_facts, "number of generated facts");
    bench_cmd->add_option("--reliable", bench_reliable, "number of reliable rules");
    bench_cmd->add_option("--unreliable", bench_unreliable, "number of unreliable rules");
    bench_cmd->add_option("--subset-budget", bench_subset_budget,
                          "wall budget in seconds for the plain subset search");
    add_engine_flags(bench_cmd, opts);

    CLI11_PARSE(app, argc, argv);

    auto fail = [&](const std::string& category, const std::string& message) {
        if (opts.format == "json") {
            nlohmann::json j;
            j["error"] = {{"category", category}, {"message", message}};
            std::cerr << j.dump() << "\n";
        } else {
            std::cerr << "error (" << category << "): " << message << "\n";
        }
        return 2;
    };

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(opts);
        if (repairs_cmd->parsed()) return cmd_repairs(opts);
        if (query_cmd->parsed()) return cmd_query(opts, query_text);
        if (bench_cmd->parsed())
            return cmd_bench(opts, bench_facts, bench_reliable, bench_unreliable,
                             bench_subset_budget);
    } catch (const ParseError& e) {
        return fail("parse", e.what());
    } catch (const UnsafeQueryError& e) {
        return fail("unsafe-query", e.what());
    } catch (const CoverednessError& e) {
        return fail("class-violation", e.what());
    } catch (const EngineError& e) {
        switch (e.kind) {
            case EngineError::Kind::DepthLimit: return fail("depth-limit", e.what());
            case EngineError::Kind::AtomCap: return fail("atom-cap", e.what());
            case EngineError::Kind::NegBranchLimit: return fail("neg-branch-limit", e.what());
            case EngineError::Kind::ExternalBackend: return fail("backend", e.what());
        }
        return fail("engine", e.what());
    } catch (const SolverError& e) {
        switch (e.kind) {
            case SolverError::Kind::Spawn: return fail("solver-spawn", e.what());
            case SolverError::Kind::Timeout: return fail("solver-timeout", e.what());
            case SolverError::Kind::Parse: return fail("solver-parse", e.what());
            case SolverError::Kind::Collision: return fail("identifier-collision", e.what());
        }
        return fail("solver", e.what());
    } catch (const SearchLimitError& e) {
        return fail("search-limit", e.what());
    } catch (const SearchTimeout& e) {
        return fail("search-timeout", e.what());
    } catch (const IoError& e) {
        return fail("io", e.what());
    } catch (const DomainError& e) {
        return fail("domain", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 2;
}
