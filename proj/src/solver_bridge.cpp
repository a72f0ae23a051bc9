#include "repairqa/solver_bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace repairqa {

void SolverConfig::validate() const {
    if (executable.empty()) throw DomainError("solver executable path is empty");
    if (timeout_seconds <= 0) throw DomainError("solver timeout must be positive");
}

// ---------------------------------------------------------------------------
// MangleTable

namespace {
std::string flip_first(const std::string& name, bool lower) {
    std::string out = name;
    if (!out.empty()) {
        unsigned char c = static_cast<unsigned char>(out[0]);
        out[0] = static_cast<char>(lower ? std::tolower(c) : std::toupper(c));
    }
    return out;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}
}  // namespace

std::string MangleTable::intern(const std::string& name, bool lower,
                                std::map<std::string, std::string>& fwd,
                                std::map<std::string, std::string>& rev, const char* what) {
    auto it = fwd.find(name);
    if (it != fwd.end()) return it->second;
    std::string target = flip_first(name, lower);
    auto [rit, inserted] = rev.emplace(target, name);
    if (!inserted && rit->second != name)
        throw SolverError(SolverError::Kind::Collision,
                          std::string("identifier collision: ") + what + " '" + name + "' and '" +
                              rit->second + "' both normalize to '" + target + "'");
    fwd.emplace(name, target);
    return target;
}

std::string MangleTable::predicate(const std::string& name) {
    return intern(name, true, pred_fwd_, pred_rev_, "predicate");
}

std::string MangleTable::constant(const std::string& name) {
    if (all_digits(name)) return name;  // numerals pass through
    std::string target = intern(name, true, const_fwd_, const_rev_, "constant");
    if (skolem_rev_.count(target))
        throw SolverError(SolverError::Kind::Collision,
                          "identifier collision: constant '" + name +
                              "' is indistinguishable from a skolem function");
    return target;
}

std::string MangleTable::skolem_fn(const SkolemId& id) {
    std::string key = id.to_string();
    auto it = skolem_fwd_.find(key);
    if (it != skolem_fwd_.end()) return it->second;
    std::string target = flip_first(key, true);
    auto [rit, inserted] = skolem_rev_.emplace(target, id);
    if (!inserted && !(rit->second == id))
        throw SolverError(SolverError::Kind::Collision,
                          "identifier collision: two skolem functions normalize to '" + target +
                              "'");
    if (const_rev_.count(target))
        throw SolverError(SolverError::Kind::Collision,
                          "identifier collision: skolem function '" + target +
                              "' is indistinguishable from a constant");
    skolem_fwd_.emplace(key, target);
    return target;
}

std::optional<std::string> MangleTable::demangle_predicate(const std::string& asp_name) const {
    auto it = pred_rev_.find(asp_name);
    if (it == pred_rev_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> MangleTable::demangle_constant(const std::string& asp_name) const {
    if (all_digits(asp_name)) return asp_name;
    auto it = const_rev_.find(asp_name);
    if (it == const_rev_.end()) return std::nullopt;
    return it->second;
}

std::optional<SkolemId> MangleTable::demangle_skolem(const std::string& asp_name) const {
    auto it = skolem_rev_.find(asp_name);
    if (it == skolem_rev_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Emission

namespace {

class AspWriter {
public:
    explicit AspWriter(MangleTable& table) : table_(table) {}

    std::string term(const Term& t, const std::map<std::string, std::string>& var_names) {
        switch (t.kind()) {
            case Term::Kind::Constant:
                return table_.constant(t.name());
            case Term::Kind::Variable:
                return var_names.at(t.name());
            case Term::Kind::Skolem: {
                std::string s = table_.skolem_fn(t.skolem_fn());
                if (t.skolem_args().empty()) return s;
                s += '(';
                for (std::size_t i = 0; i < t.skolem_args().size(); ++i) {
                    if (i) s += ',';
                    s += term(t.skolem_args()[i], var_names);
                }
                s += ')';
                return s;
            }
        }
        return {};
    }

    std::string atom(const Atom& a, const std::map<std::string, std::string>& var_names) {
        std::string s = table_.predicate(a.predicate());
        if (a.args().empty()) return s;
        s += '(';
        for (std::size_t i = 0; i < a.arity(); ++i) {
            if (i) s += ',';
            s += term(a.args()[i], var_names);
        }
        s += ')';
        return s;
    }

    // Upper-cased variable names, collision-checked per rule.
    std::map<std::string, std::string> rule_vars(const NormalRule& r) {
        std::vector<std::string> vars;
        for (const Atom& a : r.head) a.collect_variables(vars);
        for (const Atom& a : r.body_pos) a.collect_variables(vars);
        for (const Atom& a : r.body_neg) a.collect_variables(vars);
        std::map<std::string, std::string> fwd;
        std::map<std::string, std::string> rev;
        for (const std::string& v : vars) {
            if (fwd.count(v)) continue;
            std::string target = flip_first(v, false);
            auto [it, inserted] = rev.emplace(target, v);
            if (!inserted && it->second != v)
                throw SolverError(SolverError::Kind::Collision,
                                  "identifier collision: variables '" + v + "' and '" +
                                      it->second + "' both normalize to '" + target + "'");
            fwd.emplace(v, target);
        }
        return fwd;
    }

private:
    MangleTable& table_;
};

}  // namespace

AspProgram emit_asp(const Database& db, const std::vector<NormalRule>& rules) {
    AspProgram out;
    AspWriter writer(out.table);
    std::ostringstream os;
    const std::map<std::string, std::string> no_vars;

    for (const Atom& fact : db) os << writer.atom(fact, no_vars) << ".\n";

    for (const NormalRule& r : rules) {
        auto vars = writer.rule_vars(r);
        std::string body;
        bool first = true;
        for (const Atom& a : r.body_pos) {
            body += (first ? "" : ", ");
            body += writer.atom(a, vars);
            first = false;
        }
        for (const Atom& a : r.body_neg) {
            body += (first ? "not " : ", not ");
            body += writer.atom(a, vars);
            first = false;
        }
        bool constraint = r.head.size() == 1 && r.head[0].is_falsum();
        if (constraint) {
            os << ":- " << body << ".\n";
        } else {
            for (const Atom& h : r.head) {
                os << writer.atom(h, vars);
                if (!body.empty()) os << " :- " << body;
                os << ".\n";
            }
        }
    }
    out.text = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// Answer-set parsing

namespace {

class AnswerAtomParser {
public:
    AnswerAtomParser(const std::string& text, const MangleTable& table)
        : text_(text), table_(table) {}

    Atom parse_atom() {
        std::string name = ident();
        TermList args;
        if (peek() == '(') {
            ++i_;
            while (true) {
                args.push_back(parse_term());
                if (peek() == ',') {
                    ++i_;
                    continue;
                }
                break;
            }
            expect(')');
        }
        auto pred = table_.demangle_predicate(name);
        if (!pred)
            throw SolverError(SolverError::Kind::Parse,
                              "unknown predicate '" + name + "' in solver output");
        return Atom(*pred, std::move(args));
    }

    bool at_end() const { return i_ >= text_.size(); }

private:
    Term parse_term() {
        std::string name = ident();
        if (peek() == '(') {
            auto fn = table_.demangle_skolem(name);
            if (!fn)
                throw SolverError(SolverError::Kind::Parse,
                                  "unknown function '" + name + "' in solver output");
            ++i_;
            TermList args;
            while (true) {
                args.push_back(parse_term());
                if (peek() == ',') {
                    ++i_;
                    continue;
                }
                break;
            }
            expect(')');
            return Term::skolem(*fn, std::move(args));
        }
        auto fn = table_.demangle_skolem(name);
        if (fn) return Term::skolem(*fn, {});
        auto c = table_.demangle_constant(name);
        if (!c)
            throw SolverError(SolverError::Kind::Parse,
                              "unknown constant '" + name + "' in solver output");
        return Term::constant(*c);
    }

    char peek() const { return i_ < text_.size() ? text_[i_] : '\0'; }

    void expect(char c) {
        if (peek() != c)
            throw SolverError(SolverError::Kind::Parse,
                              std::string("malformed atom in solver output, expected '") + c +
                                  "': " + text_);
        ++i_;
    }

    std::string ident() {
        std::size_t start = i_;
        while (i_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
            ++i_;
        if (i_ == start)
            throw SolverError(SolverError::Kind::Parse,
                              "malformed atom in solver output: " + text_);
        return text_.substr(start, i_ - start);
    }

    const std::string& text_;
    const MangleTable& table_;
    std::size_t i_ = 0;
};

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream is(text);
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

}  // namespace

std::vector<Instance> parse_answer_sets(const std::string& output, const MangleTable& table) {
    std::vector<std::string> lines = split_lines(output);
    std::vector<Instance> models;
    bool saw_status = false;
    bool unsat = false;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.rfind("Answer:", 0) == 0 || line.rfind("Answer ", 0) == 0) {
            std::string atoms_line = i + 1 < lines.size() ? lines[i + 1] : "";
            ++i;
            AtomList atoms;
            std::istringstream as(atoms_line);
            std::string token;
            while (as >> token) {
                AnswerAtomParser parser(token, table);
                atoms.push_back(parser.parse_atom());
            }
            models.emplace_back(std::move(atoms));
        } else if (line.find("UNSATISFIABLE") != std::string::npos) {
            saw_status = true;
            unsat = true;
        } else if (line.find("SATISFIABLE") != std::string::npos ||
                   line.find("OPTIMUM FOUND") != std::string::npos) {
            saw_status = true;
        }
    }
    if (!saw_status)
        throw SolverError(SolverError::Kind::Parse,
                          "solver output carries no SATISFIABLE/UNSATISFIABLE marker");
    if (unsat && !models.empty())
        throw SolverError(SolverError::Kind::Parse,
                          "solver output mixes UNSATISFIABLE with answer sets");
    return models;
}

// ---------------------------------------------------------------------------
// Subprocess driver

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        char name[] = "/tmp/repairqa_asp_XXXXXX";
        int fd = ::mkstemp(name);
        if (fd < 0) throw SolverError(SolverError::Kind::Spawn, "cannot create temporary file");
        path = name;
        std::size_t off = 0;
        while (off < contents.size()) {
            ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
            if (n <= 0) {
                ::close(fd);
                throw SolverError(SolverError::Kind::Spawn, "cannot write temporary file");
            }
            off += static_cast<std::size_t>(n);
        }
        ::close(fd);
    }
    ~TempFile() { ::unlink(path.c_str()); }
};

}  // namespace

SolveResult solve_external(const AspProgram& program, const SolverConfig& cfg) {
    cfg.validate();
    TempFile file(program.text);

    std::vector<std::string> argv_store;
    argv_store.push_back(cfg.executable);
    argv_store.push_back("--models=" + std::to_string(cfg.model_limit));
    for (const std::string& a : cfg.extra_args) argv_store.push_back(a);
    argv_store.push_back(file.path);

    std::vector<char*> argv;
    for (std::string& s : argv_store) argv.push_back(s.data());
    argv.push_back(nullptr);

    int out_pipe[2];
    if (::pipe(out_pipe) != 0)
        throw SolverError(SolverError::Kind::Spawn, "cannot create pipe");

    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        throw SolverError(SolverError::Kind::Spawn, "fork failed");
    }
    if (pid == 0) {
        ::setpgid(0, 0);  // own process group, so a timeout kill reaps helpers too
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(out_pipe[1]);

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(cfg.timeout_seconds));
    std::string output;
    char buffer[4096];
    bool timed_out = false;
    for (;;) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            timed_out = true;
            break;
        }
        int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        struct pollfd pfd = {out_pipe[0], POLLIN, 0};
        int rc = ::poll(&pfd, 1, std::max(wait_ms, 1));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rc == 0) {
            timed_out = true;
            break;
        }
        ssize_t n = ::read(out_pipe[0], buffer, sizeof(buffer));
        if (n < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (n == 0) break;  // solver closed stdout
        output.append(buffer, static_cast<std::size_t>(n));
    }
    ::close(out_pipe[0]);

    int status = 0;
    if (timed_out) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        return {SolveStatus::Timeout, {}};
    }
    ::waitpid(pid, &status, 0);
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
        throw SolverError(SolverError::Kind::Spawn,
                          "cannot execute solver '" + cfg.executable + "'");

    std::vector<Instance> models = parse_answer_sets(output, program.table);
    if (output.find("UNSATISFIABLE") != std::string::npos)
        return {SolveStatus::Unsatisfiable, {}};
    return {SolveStatus::Satisfiable, std::move(models)};
}

// ---------------------------------------------------------------------------
// Engine adapter

ExternalSolverBackend::ExternalSolverBackend(SolverConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

std::vector<Instance> ExternalSolverBackend::stable_models(const Database& db,
                                                           const std::vector<NormalRule>& rules,
                                                           std::size_t limit) {
    AspProgram program = emit_asp(db, rules);
    SolverConfig cfg = cfg_;
    cfg.model_limit = limit;
    SolveResult result = solve_external(program, cfg);
    if (result.status == SolveStatus::Timeout)
        throw SolverError(SolverError::Kind::Timeout,
                          "solver timed out after " + std::to_string(cfg.timeout_seconds) +
                              "s; result is unknown, not inconsistent");
    return result.models;
}

}  // namespace repairqa
