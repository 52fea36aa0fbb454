#include "useries/serialize.hpp"

#include "useries/error.hpp"
#include "useries/planner.hpp"

namespace useries {

using nlohmann::json;

json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json to_json(const SogParams& p) {
    return {{"b", p.b()},
            {"sigma", p.sigma()},
            {"M", p.M()},
            {"l_min", p.l_min()},
            {"continuity", to_string(p.continuity())},
            {"omega", p.omega()},
            {"r_c", p.r_c()}};
}

SogParams params_from_json(const json& j) {
    try {
        return SogParams::with_cutoff(j.at("b").get<double>(), j.at("sigma").get<double>(), j.at("M").get<int>(),
                                      j.value("l_min", 0), j.at("r_c").get<double>(),
                                      parse_continuity(j.value("continuity", std::string("C0"))),
                                      j.value("omega", 1.0));
    } catch (const json::exception& e) {
        throw ParseError(std::string("SogParams JSON: ") + e.what(), 0);
    }
}

json to_json(const ErrorBreakdown& b) {
    json up = json::array();
    json down = json::array();
    for (const auto& f : b.F_G_up) {
        up.push_back(to_json(f));
    }
    for (const auto& f : b.F_G_down) {
        down.push_back(to_json(f));
    }
    return {{"E_T", b.E_T},
            {"E_G_up", b.E_G_up},
            {"E_G_down", b.E_G_down},
            {"F_T_scale", b.F_T_scale},
            {"F_G_up", up},
            {"F_G_down", down},
            {"total_energy_estimate", b.total_energy_estimate}};
}

json to_json(const ErrorReport& r) {
    json j = {{"U_exact", r.U_exact},
              {"U_approx", r.U_approx},
              {"energy_error", r.energy_error},
              {"rel_energy_error", r.rel_energy_error},
              {"rel_force_error", r.rel_force_error}};
    if (r.breakdown) {
        j["breakdown"] = to_json(*r.breakdown);
    }
    return j;
}

json to_json(const ParameterPlan& p) {
    return {{"epsilon", p.epsilon},
            {"b", p.b},
            {"sigma", p.sigma},
            {"M", p.M},
            {"l_min", p.l_min},
            {"r_c", p.r_c},
            {"omega", p.omega},
            {"continuity", to_string(p.continuity)},
            {"predicted_energy_error", p.predicted_energy_error},
            {"predicted_force_error", p.predicted_force_error},
            {"warnings", p.warnings}};
}

} // namespace useries
