#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "pit2crack/fatigue.hpp"
#include "pit2crack/material.hpp"
#include "pit2crack/util.hpp"

namespace p2c {

inline nlohmann::json settings_to_json(const AnalysisSettings& s) {
    return {{"plane_step_deg", s.plane_step_deg},
            {"psi_step_deg", s.psi_step_deg},
            {"ksur", s.ksur},
            {"mean_stress_correction",
             s.mean_stress_correction == MeanStressCorrection::morrow ? "morrow" : "none"},
            {"damage_rule", "miner"},
            {"nf_bracket", {s.nf_min, s.nf_max}}};
}

namespace detail {

inline std::string life_value(double v) {
    return std::isinf(v) ? std::string("inf") : format_double(v);
}

inline nlohmann::json result_row_json(const LifeResult& r) {
    nlohmann::json j;
    j["location_id"] = r.location_id;
    j["infinite_life"] = r.infinite_life();
    if (r.infinite_life()) {
        j["nf"] = nullptr;
        j["log10_life"] = nullptr;
    } else {
        j["nf"] = r.nf;
        j["log10_life"] = r.log10_life;
    }
    j["critical_plane"] = {{"theta_deg", r.critical_plane.theta_deg},
                           {"phi_deg", r.critical_plane.phi_deg},
                           {"psi_deg", r.critical_plane.psi_deg}};
    j["damage_per_pass"] = r.damage_per_pass;
    return j;
}

} // namespace detail

/// Results CSV, one row per location, sorted by location_id.
inline std::string life_results_csv(std::vector<const LifeResult*> rows) {
    std::sort(rows.begin(), rows.end(), [](const LifeResult* a, const LifeResult* b) {
        return a->location_id < b->location_id;
    });
    std::string out = "location_id,nf,log10_life,theta,phi,psi,damage_per_pass\n";
    for (const auto* r : rows) {
        out += r->location_id;
        out.push_back(',');
        out += detail::life_value(r->nf);
        out.push_back(',');
        out += detail::life_value(r->log10_life);
        out.push_back(',');
        out += format_double(r->critical_plane.theta_deg);
        out.push_back(',');
        out += format_double(r->critical_plane.phi_deg);
        out.push_back(',');
        out += format_double(r->critical_plane.psi_deg);
        out.push_back(',');
        out += format_double(r->damage_per_pass);
        out.push_back('\n');
    }
    return out;
}

inline std::string life_results_csv(const LifeField& field) {
    std::vector<const LifeResult*> rows;
    rows.reserve(field.results.size());
    for (const auto& r : field.results) rows.push_back(&r);
    return life_results_csv(std::move(rows));
}

/// Full JSON report: settings, material, per-location summary rows, and the
/// per-cycle damage table of the worst location.
inline nlohmann::json life_report_json(const LifeField& field, const MaterialRecord& material,
                                       const AnalysisSettings& settings) {
    nlohmann::json j;
    j["settings"] = settings_to_json(settings);
    j["material"] = material_to_json(material);
    j["results"] = nlohmann::json::array();
    std::vector<const LifeResult*> rows;
    for (const auto& r : field.results) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const LifeResult* a, const LifeResult* b) {
        return a->location_id < b->location_id;
    });
    for (const auto* r : rows) j["results"].push_back(detail::result_row_json(*r));

    const LifeResult& worst = field.results[field.worst_index];
    nlohmann::json jw = detail::result_row_json(worst);
    jw["cycle_table"] = nlohmann::json::array();
    for (const auto& c : worst.cycle_table)
        jw["cycle_table"].push_back({{"i_start", c.i_start},
                                     {"i_end", c.i_end},
                                     {"weight", c.weight},
                                     {"d_gamma", c.d_gamma},
                                     {"d_eps_n", c.d_eps_n},
                                     {"sigma_n_mean", c.sigma_n_mean},
                                     {"nf", c.nf},
                                     {"damage", c.damage}});
    j["worst"] = jw;
    return j;
}

} // namespace p2c
