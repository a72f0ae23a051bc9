#include "repairqa/json_out.hpp"

namespace repairqa {

nlohmann::json to_json(const Instance& instance) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& a : instance) atoms.push_back(a.to_string());
    return atoms;
}

nlohmann::json to_json(const ClassReport& report) {
    nlohmann::json j;
    j["r_acyclic"] = report.r_acyclic;
    if (report.r_stratification)
        j["r_stratification"] = *report.r_stratification;
    else
        j["r_stratification"] = nullptr;
    j["guarded"] = report.guarded;
    if (report.stratification)
        j["stratified"] = *report.stratification;
    else
        j["stratified"] = nullptr;
    return j;
}

nlohmann::json to_json(const Verdict& verdict) {
    nlohmann::json j;
    j["entailed"] = verdict.entailed;
    j["repairs_examined"] = verdict.repairs_examined;
    if (verdict.countermodel) {
        j["countermodel"] = {{"repair", verdict.countermodel->repair},
                             {"model", to_json(verdict.countermodel->model)},
                             {"reason", verdict.countermodel->reason}};
    } else {
        j["countermodel"] = nullptr;
    }
    j["warnings"] = verdict.warnings;
    return j;
}

std::string repair_set_jsonl(const RepairSet& repairs) {
    std::string out;
    for (std::size_t i = 0; i < repairs.repairs.size(); ++i) {
        nlohmann::json j;
        j["repair"] = repairs.repairs[i];
        j["witness"] = to_json(repairs.witnesses[i]);
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace repairqa
