#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repairqa/core.hpp"

namespace repairqa {

struct SourcePos {
    int line = 0;
    int column = 0;
    std::string to_string() const {
        return std::to_string(line) + ":" + std::to_string(column);
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, const std::string& message)
        : std::runtime_error(pos.to_string() + ": " + message), pos(pos), message(message) {}
    SourcePos pos;
    std::string message;
};

// A parsed rule file: the rule set plus the optional @priority
// prioritization and @weight assignment, with per-rule source
// positions for diagnostics.
struct ProgramDocument {
    RuleSet rules;
    std::optional<std::vector<std::vector<std::string>>> prioritization;
    std::optional<std::map<std::string, std::int64_t>> weights;
    std::vector<SourcePos> rule_positions;  // parallel to rules

    PreferenceSpec preference(PrefKind kind) const;
};

bool operator==(const Rule& a, const Rule& b);
bool operator==(const ProgramDocument& a, const ProgramDocument& b);

// Rule language, one statement per '.':
//
//   r2: Bat(x) -> exists y . LiveIn(x,y), Cave(y).
//   r4: Mammal(x), not CanFly(x) -> CanNotFly(x).
//   r7: Bird(x), Mammal(x) -> bottom.
//   Penguin(tux).                     % fact rule (empty body)
//   @priority 1 = r1, r2, r3.
//   @weight r4 = 2.
//
// Identifiers are case-sensitive. An argument is a variable when it is
// a single letter u..z with an optional digit suffix (x, y2) or written
// with an explicit '?' sigil (?name); every other identifier or integer
// is a constant. '%' starts a comment.
ProgramDocument parse_program(const std::string& text);

// '.'-terminated ground atoms over constants.
Database parse_database(const std::string& text);

// '? atom, not atom, ...' — variables implicitly existentially closed.
Query parse_query(const std::string& text);

std::string serialize_program(const ProgramDocument& doc);
std::string serialize_database(const Database& db);
std::string serialize_query(const Query& q);

}  // namespace repairqa
