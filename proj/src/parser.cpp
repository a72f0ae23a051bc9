#include "repairqa/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace repairqa {

namespace {

enum class Tok {
    Ident,
    Integer,
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Colon,
    Question,
    At,
    Equals,
    KwNot,
    KwExists,
    KwBottom,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_trivia();
        SourcePos pos{line_, col_};
        if (at_end()) return {Tok::End, "", pos};
        char c = text_[i_];
        if (c == '(') return advance({Tok::LParen, "(", pos});
        if (c == ')') return advance({Tok::RParen, ")", pos});
        if (c == ',') return advance({Tok::Comma, ",", pos});
        if (c == '.') return advance({Tok::Dot, ".", pos});
        if (c == ':') return advance({Tok::Colon, ":", pos});
        if (c == '?') return advance({Tok::Question, "?", pos});
        if (c == '@') return advance({Tok::At, "@", pos});
        if (c == '=') return advance({Tok::Equals, "=", pos});
        if (c == '-' && i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
            advance({Tok::End, "", pos});
            advance({Tok::End, "", pos});
            return {Tok::Arrow, "->", pos};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
                s += text_[i_];
                advance({Tok::End, "", pos});
            }
            return {Tok::Integer, s, pos};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[i_])) ||
                                 text_[i_] == '_')) {
                s += text_[i_];
                advance({Tok::End, "", pos});
            }
            if (s == "not") return {Tok::KwNot, s, pos};
            if (s == "exists") return {Tok::KwExists, s, pos};
            if (s == kFalsumPredicate) return {Tok::KwBottom, s, pos};
            return {Tok::Ident, s, pos};
        }
        throw ParseError(pos, std::string("unexpected character '") + c + "'");
    }

private:
    bool at_end() const { return i_ >= text_.size(); }

    Token advance(Token t) {
        if (text_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
        return t;
    }

    void skip_trivia() {
        while (!at_end()) {
            char c = text_[i_];
            if (c == '%') {
                while (!at_end() && text_[i_] != '\n') advance({Tok::End, "", {}});
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance({Tok::End, "", {}});
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool is_variable_name(const std::string& s) {
    if (s.empty() || s[0] < 'u' || s[0] > 'z') return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

struct ParsedLiteral {
    bool negated;
    Atom atom;
    SourcePos pos;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { shift(); }

    ProgramDocument program() {
        std::vector<Rule> rules;
        std::vector<SourcePos> positions;
        std::map<int, std::pair<std::vector<std::string>, SourcePos>> priorities;
        std::map<std::string, std::pair<std::int64_t, SourcePos>> weights;
        std::size_t counter = 0;

        while (cur_.kind != Tok::End) {
            if (cur_.kind == Tok::At) {
                directive(priorities, weights);
            } else {
                ++counter;
                statement(rules, positions, counter);
            }
        }

        ProgramDocument doc;
        try {
            doc.rules = RuleSet(std::move(rules));
        } catch (const DomainError& e) {
            throw ParseError({0, 0}, e.what());
        }
        doc.rule_positions = std::move(positions);
        check_arities(doc.rules, doc.rule_positions);

        if (!weights.empty()) {
            std::map<std::string, std::int64_t> w;
            for (const auto& [label, entry] : weights) {
                if (!doc.rules.has_label(label))
                    throw ParseError(entry.second, "@weight refers to unknown label '" + label + "'");
                w.emplace(label, entry.first);
            }
            doc.weights = std::move(w);
        }
        if (!priorities.empty()) {
            std::vector<std::vector<std::string>> levels;
            std::set<std::string> used;
            for (const auto& [level, entry] : priorities) {
                for (const std::string& label : entry.first) {
                    if (!doc.rules.has_label(label))
                        throw ParseError(entry.second,
                                         "@priority refers to unknown label '" + label + "'");
                    if (!used.insert(label).second)
                        throw ParseError(entry.second, "priority levels are not a partition: '" +
                                                           label + "' occurs twice");
                }
                levels.push_back(entry.first);
            }
            if (used.size() != doc.rules.size()) {
                for (const std::string& label : doc.rules.labels())
                    if (!used.count(label))
                        throw ParseError({0, 0}, "priority levels are not a partition: '" + label +
                                                     "' is not assigned to any level");
            }
            doc.prioritization = std::move(levels);
        }
        return doc;
    }

    Database database() {
        AtomList facts;
        while (cur_.kind != Tok::End) {
            SourcePos pos = cur_.pos;
            if (cur_.kind == Tok::KwBottom)
                throw ParseError(pos, "the reserved predicate '" + kFalsumPredicate +
                                          "' cannot occur in a database");
            Atom a = atom();
            if (!a.is_ground())
                throw ParseError(pos, "non-ground fact in database: " + a.to_string());
            expect(Tok::Dot, "'.'");
            facts.push_back(std::move(a));
        }
        check_arity_list(facts);
        return Database(std::move(facts));
    }

    Query query() {
        expect(Tok::Question, "'?'");
        AtomList pos, neg;
        if (cur_.kind != Tok::End && cur_.kind != Tok::Dot) {
            while (true) {
                ParsedLiteral lit = literal();
                (lit.negated ? neg : pos).push_back(std::move(lit.atom));
                if (cur_.kind != Tok::Comma) break;
                shift();
            }
        }
        if (cur_.kind == Tok::Dot) shift();
        expect(Tok::End, "end of query");
        AtomList all = pos;
        all.insert(all.end(), neg.begin(), neg.end());
        check_arity_list(all);
        try {
            return Query(std::move(pos), std::move(neg));
        } catch (const DomainError& e) {
            throw ParseError({1, 1}, e.what());
        }
    }

private:
    void shift() {
        if (pushed_back_) {
            cur_ = *pushed_back_;
            pushed_back_.reset();
        } else {
            cur_ = lexer_.next();
        }
    }

    Token expect(Tok kind, const std::string& what) {
        if (cur_.kind != kind)
            throw ParseError(cur_.pos, "expected " + what + ", found '" +
                                           (cur_.kind == Tok::End ? "end of input" : cur_.text) +
                                           "'");
        Token t = cur_;
        shift();
        return t;
    }

    Term term() {
        if (cur_.kind == Tok::Question) {
            shift();
            Token name = expect(Tok::Ident, "variable name after '?'");
            return Term::variable(name.text);
        }
        if (cur_.kind == Tok::Integer) {
            Token t = cur_;
            shift();
            return Term::constant(t.text);
        }
        Token t = expect(Tok::Ident, "term");
        if (cur_.kind == Tok::LParen)
            throw ParseError(cur_.pos, "function terms are not part of the input language");
        if (is_variable_name(t.text)) return Term::variable(t.text);
        return Term::constant(t.text);
    }

    Atom atom() {
        Token name = expect(Tok::Ident, "predicate name");
        TermList args;
        if (cur_.kind == Tok::LParen) {
            shift();
            if (cur_.kind != Tok::RParen) {
                while (true) {
                    args.push_back(term());
                    if (cur_.kind != Tok::Comma) break;
                    shift();
                }
            }
            expect(Tok::RParen, "')'");
        }
        return Atom(name.text, std::move(args));
    }

    ParsedLiteral literal() {
        SourcePos pos = cur_.pos;
        bool negated = false;
        if (cur_.kind == Tok::KwNot) {
            negated = true;
            shift();
        }
        if (cur_.kind == Tok::KwBottom)
            throw ParseError(cur_.pos, "the reserved predicate '" + kFalsumPredicate +
                                           "' cannot occur here");
        return {negated, atom(), pos};
    }

    // rule := [label ':'] literal-list ['->' head] '.'
    //       | [label ':'] '->' head '.'
    void statement(std::vector<Rule>& rules, std::vector<SourcePos>& positions,
                   std::size_t counter) {
        SourcePos pos = cur_.pos;
        std::string label = "r" + std::to_string(counter);

        // An identifier directly followed by ':' is a label.
        if (cur_.kind == Tok::Ident) {
            Token save = cur_;
            shift();
            if (cur_.kind == Tok::Colon) {
                label = save.text;
                shift();
            } else {
                pushed_back_ = cur_;
                cur_ = save;
            }
        }

        std::vector<ParsedLiteral> body;
        if (cur_.kind != Tok::Arrow) {
            while (true) {
                body.push_back(literal());
                if (cur_.kind != Tok::Comma) break;
                shift();
            }
        }

        AtomList head;
        std::vector<std::string> exist_vars;
        AtomList body_pos, body_neg;

        if (cur_.kind == Tok::Arrow) {
            shift();
            for (ParsedLiteral& lit : body)
                (lit.negated ? body_neg : body_pos).push_back(std::move(lit.atom));
            if (cur_.kind == Tok::KwBottom) {
                shift();
                head.push_back(Atom::falsum());
            } else {
                if (cur_.kind == Tok::KwExists) {
                    shift();
                    while (true) {
                        Token v = expect(Tok::Ident, "existential variable name");
                        exist_vars.push_back(v.text);
                        if (cur_.kind != Tok::Comma) break;
                        shift();
                    }
                    expect(Tok::Dot, "'.' after existential variable list");
                }
                while (true) {
                    SourcePos hp = cur_.pos;
                    if (cur_.kind == Tok::KwNot)
                        throw ParseError(hp, "negated atom in rule head");
                    head.push_back(head_atom(exist_vars));
                    if (cur_.kind != Tok::Comma) break;
                    shift();
                }
            }
        } else {
            // No '->': the literal list is the head of a fact rule.
            for (ParsedLiteral& lit : body) {
                if (lit.negated) throw ParseError(lit.pos, "negated atom in rule head");
                if (lit.atom.is_falsum())
                    throw ParseError(lit.pos, "a constraint needs an explicit '-> " +
                                                  kFalsumPredicate + "'");
                head.push_back(std::move(lit.atom));
            }
            if (head.empty()) throw ParseError(pos, "empty statement");
        }
        expect(Tok::Dot, "'.'");

        try {
            rules.emplace_back(label, std::move(body_pos), std::move(body_neg), std::move(head),
                               std::move(exist_vars));
        } catch (const DomainError& e) {
            throw ParseError(pos, e.what());
        }
        positions.push_back(pos);
    }

    // Head atoms may use the declared existential variables by name even
    // when the name does not follow the variable lexical convention.
    Atom head_atom(const std::vector<std::string>& exist_vars) {
        Token name = expect(Tok::Ident, "predicate name");
        TermList args;
        if (cur_.kind == Tok::LParen) {
            shift();
            if (cur_.kind != Tok::RParen) {
                while (true) {
                    if (cur_.kind == Tok::Ident &&
                        std::find(exist_vars.begin(), exist_vars.end(), cur_.text) !=
                            exist_vars.end()) {
                        args.push_back(Term::variable(cur_.text));
                        shift();
                    } else {
                        args.push_back(term());
                    }
                    if (cur_.kind != Tok::Comma) break;
                    shift();
                }
            }
            expect(Tok::RParen, "')'");
        }
        return Atom(name.text, std::move(args));
    }

    void directive(std::map<int, std::pair<std::vector<std::string>, SourcePos>>& priorities,
                   std::map<std::string, std::pair<std::int64_t, SourcePos>>& weights) {
        SourcePos pos = cur_.pos;
        expect(Tok::At, "'@'");
        Token kw = expect(Tok::Ident, "'priority' or 'weight'");
        if (kw.text == "priority") {
            Token level = expect(Tok::Integer, "priority level number");
            expect(Tok::Equals, "'='");
            std::vector<std::string> labels;
            while (true) {
                Token l = expect(Tok::Ident, "rule label");
                labels.push_back(l.text);
                if (cur_.kind != Tok::Comma) break;
                shift();
            }
            expect(Tok::Dot, "'.'");
            int lv = std::stoi(level.text);
            if (!priorities.emplace(lv, std::make_pair(std::move(labels), pos)).second)
                throw ParseError(pos, "duplicate @priority level " + level.text);
        } else if (kw.text == "weight") {
            Token label = expect(Tok::Ident, "rule label");
            expect(Tok::Equals, "'='");
            Token value = expect(Tok::Integer, "weight value");
            expect(Tok::Dot, "'.'");
            std::int64_t w = std::stoll(value.text);
            if (w < 1) throw ParseError(value.pos, "weight must be >= 1");
            if (!weights.emplace(label.text, std::make_pair(w, pos)).second)
                throw ParseError(pos, "duplicate @weight for label '" + label.text + "'");
        } else {
            throw ParseError(kw.pos, "unknown directive '@" + kw.text + "'");
        }
    }

    void check_arities(const RuleSet& rules, const std::vector<SourcePos>& positions) {
        std::map<std::string, std::size_t> arity;
        auto check = [&](const Atom& a, SourcePos pos) {
            auto [it, inserted] = arity.emplace(a.predicate(), a.arity());
            if (!inserted && it->second != a.arity())
                throw ParseError(pos, "predicate '" + a.predicate() + "' used with arity " +
                                          std::to_string(a.arity()) + " but declared with arity " +
                                          std::to_string(it->second));
        };
        std::size_t i = 0;
        for (const Rule& r : rules) {
            SourcePos pos = i < positions.size() ? positions[i] : SourcePos{};
            for (const Atom& a : r.body_pos()) check(a, pos);
            for (const Atom& a : r.body_neg()) check(a, pos);
            for (const Atom& a : r.head()) check(a, pos);
            ++i;
        }
    }

    void check_arity_list(const AtomList& atoms) {
        std::map<std::string, std::size_t> arity;
        for (const Atom& a : atoms) {
            auto [it, inserted] = arity.emplace(a.predicate(), a.arity());
            if (!inserted && it->second != a.arity())
                throw ParseError({0, 0}, "predicate '" + a.predicate() + "' used with arity " +
                                             std::to_string(a.arity()) +
                                             " but declared with arity " +
                                             std::to_string(it->second));
        }
    }

    Token cur_;
    std::optional<Token> pushed_back_;
    Lexer lexer_;
};

}  // namespace

ProgramDocument parse_program(const std::string& text) {
    Parser p(text);
    return p.program();
}

Database parse_database(const std::string& text) {
    Parser p(text);
    return p.database();
}

Query parse_query(const std::string& text) {
    Parser p(text);
    return p.query();
}

PreferenceSpec ProgramDocument::preference(PrefKind kind) const {
    PreferenceSpec spec;
    spec.kind = kind;
    if (kind == PrefKind::PrioSubset || kind == PrefKind::PrioCardinality) {
        if (!prioritization)
            throw DomainError("preference kind '" + std::string(pref_kind_name(kind)) +
                              "' needs @priority directives");
        spec.priority_levels = *prioritization;
    }
    if (kind == PrefKind::Weight) {
        // Rules without an explicit @weight default to weight 1.
        for (const std::string& label : rules.labels()) spec.weights[label] = 1;
        if (weights)
            for (const auto& [label, w] : *weights) spec.weights[label] = w;
    }
    return spec;
}

bool operator==(const Rule& a, const Rule& b) {
    return a.label() == b.label() && a.body_pos() == b.body_pos() &&
           a.body_neg() == b.body_neg() && a.head() == b.head() &&
           a.exist_vars() == b.exist_vars();
}

bool operator==(const ProgramDocument& a, const ProgramDocument& b) {
    return a.rules.rules() == b.rules.rules() && a.prioritization == b.prioritization &&
           a.weights == b.weights;
}

std::string serialize_program(const ProgramDocument& doc) {
    std::ostringstream os;
    for (const Rule& r : doc.rules) os << r.to_string() << "\n";
    if (doc.prioritization) {
        int level = 1;
        for (const auto& labels : *doc.prioritization) {
            os << "@priority " << level++ << " =";
            for (std::size_t i = 0; i < labels.size(); ++i)
                os << (i ? ", " : " ") << labels[i];
            os << ".\n";
        }
    }
    if (doc.weights) {
        for (const auto& [label, w] : *doc.weights)
            os << "@weight " << label << " = " << w << ".\n";
    }
    return os.str();
}

std::string serialize_database(const Database& db) {
    std::ostringstream os;
    for (const Atom& a : db) os << a.to_string() << ".\n";
    return os.str();
}

std::string serialize_query(const Query& q) {
    return q.to_string();
}

}  // namespace repairqa
