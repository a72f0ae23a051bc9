#pragma once

#include <string>

#include <json.hpp>

#include "repairqa/analysis.hpp"
#include "repairqa/core.hpp"
#include "repairqa/query_eval.hpp"

namespace repairqa {

nlohmann::json to_json(const ClassReport& report);
nlohmann::json to_json(const Verdict& verdict);
nlohmann::json to_json(const Instance& instance);

// One JSON object per repair, one per line:
//   {"repair": ["r1", ...], "witness": ["Bat(a)", ...]}
std::string repair_set_jsonl(const RepairSet& repairs);

}  // namespace repairqa
