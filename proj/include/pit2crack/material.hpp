#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pit2crack/errors.hpp"
#include "pit2crack/util.hpp"

namespace p2c {

// Unit convention used throughout the library: stresses in MPa, strains
// dimensionless, lengths in micrometres. Shear strains are engineering (γ).

struct ElasticConstants {
    double youngs_modulus = 0.0;   // MPa
    double poisson_elastic = 0.0;
    double poisson_plastic = 0.0;

    void validate() const {
        if (!(youngs_modulus > 0.0))
            throw DomainError("ElasticConstants: youngs_modulus must be > 0 (got " +
                              format_double(youngs_modulus) + ")");
        if (!(poisson_elastic >= 0.0 && poisson_elastic < 0.5))
            throw DomainError("ElasticConstants: poisson_elastic must satisfy 0 <= nu_e < 0.5 (got " +
                              format_double(poisson_elastic) + ")");
        if (!(poisson_plastic > 0.0 && poisson_plastic <= 0.5))
            throw DomainError("ElasticConstants: poisson_plastic must satisfy 0 < nu_p <= 0.5 (got " +
                              format_double(poisson_plastic) + ")");
    }
};

/// Monotonic tension curve: linear to yield, optional plateau up to
/// knee_strain, then linear hardening to the ultimate point, constant beyond.
struct TrilinearCurve {
    double youngs_modulus = 0.0;    // MPa
    double yield_strength = 0.0;    // MPa
    double ultimate_strength = 0.0; // MPa
    double elongation = 0.0;        // strain at ultimate_strength
    double knee_strain = 0.0;       // strain where hardening begins

    double yield_strain() const { return yield_strength / youngs_modulus; }

    void validate() const {
        if (!(youngs_modulus > 0.0))
            throw DomainError("TrilinearCurve: youngs_modulus must be > 0 (got " +
                              format_double(youngs_modulus) + ")");
        if (!(yield_strength > 0.0 && yield_strength < ultimate_strength))
            throw DomainError("TrilinearCurve: need 0 < yield_strength < ultimate_strength (got " +
                              format_double(yield_strength) + " vs " +
                              format_double(ultimate_strength) + ")");
        if (!(elongation > yield_strain()))
            throw DomainError("TrilinearCurve: elongation must exceed yield strain " +
                              format_double(yield_strain()) + " (got " +
                              format_double(elongation) + ")");
        if (!(knee_strain >= yield_strain()))
            throw DomainError("TrilinearCurve: knee_strain must be >= yield strain " +
                              format_double(yield_strain()) + " (got " +
                              format_double(knee_strain) + ")");
        if (!(knee_strain < elongation))
            throw DomainError("TrilinearCurve: knee_strain must be < elongation (got " +
                              format_double(knee_strain) + " vs " + format_double(elongation) + ")");
    }
};

inline double trilinear_stress(const TrilinearCurve& curve, double strain) {
    curve.validate();
    if (!(strain >= 0.0))
        throw DomainError("trilinear_stress: strain must be >= 0 (got " + format_double(strain) + ")");
    const double ey = curve.yield_strain();
    if (strain <= ey) return curve.youngs_modulus * strain;
    if (strain <= curve.knee_strain) return curve.yield_strength;
    if (strain <= curve.elongation)
        return curve.yield_strength + (curve.ultimate_strength - curve.yield_strength) *
                                          (strain - curve.knee_strain) /
                                          (curve.elongation - curve.knee_strain);
    return curve.ultimate_strength;
}

/// Cyclic Ramberg-Osgood curve: eps_a = sigma_a/E + (sigma_a/K')^(1/n').
struct CyclicCurve {
    double k_prime = 0.0; // MPa
    double n_prime = 0.0;

    void validate() const {
        if (!(k_prime > 0.0))
            throw DomainError("CyclicCurve: k_prime must be > 0 (got " + format_double(k_prime) + ")");
        if (!(n_prime > 0.0 && n_prime < 1.0))
            throw DomainError("CyclicCurve: n_prime must satisfy 0 < n' < 1 (got " +
                              format_double(n_prime) + ")");
    }
};

/// Inverts the cyclic curve for the stress amplitude at a given strain
/// amplitude. Newton iteration with a maintained bracket; the residual
/// tolerance is 1e-12 + 1e-9 * strain_amplitude.
inline double cyclic_stress_amplitude(const CyclicCurve& curve, double youngs_modulus,
                                      double strain_amplitude) {
    curve.validate();
    if (!(youngs_modulus > 0.0))
        throw DomainError("cyclic_stress_amplitude: youngs_modulus must be > 0");
    if (!(strain_amplitude >= 0.0))
        throw DomainError("cyclic_stress_amplitude: strain_amplitude must be >= 0 (got " +
                          format_double(strain_amplitude) + ")");
    if (strain_amplitude == 0.0) return 0.0;

    const double inv_n = 1.0 / curve.n_prime;
    auto strain_of = [&](double s) {
        return s / youngs_modulus + std::pow(s / curve.k_prime, inv_n);
    };

    double lo = 0.0;
    double hi = std::max(youngs_modulus * strain_amplitude, curve.k_prime);
    for (int i = 0; i < 80 && strain_of(hi) < strain_amplitude; ++i) hi *= 2.0;

    const double tol = 1e-12 + 1e-9 * strain_amplitude;
    double s = std::min(hi, youngs_modulus * strain_amplitude); // elastic guess
    double resid = strain_of(s) - strain_amplitude;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(resid) < tol) return s;
        if (resid > 0.0) hi = s;
        else lo = s;
        const double deriv = 1.0 / youngs_modulus +
                             inv_n * std::pow(s / curve.k_prime, inv_n - 1.0) / curve.k_prime;
        double next = s - resid / deriv;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
        resid = strain_of(s) - strain_amplitude;
    }
    throw NumericalError("cyclic_stress_amplitude: no convergence after 200 iterations, residual " +
                         format_double(resid));
}

struct StrainLifeProps {
    double sigma_f_prime = 0.0;   // MPa, fatigue strength coefficient
    double b = 0.0;               // fatigue strength exponent (< 0)
    double epsilon_f_prime = 0.0; // fatigue ductility coefficient
    double c = 0.0;               // fatigue ductility exponent (< 0)

    void validate() const {
        if (!(sigma_f_prime > 0.0))
            throw DomainError("StrainLifeProps: sigma_f_prime must be > 0 (got " +
                              format_double(sigma_f_prime) + ")");
        if (!(epsilon_f_prime > 0.0))
            throw DomainError("StrainLifeProps: epsilon_f_prime must be > 0 (got " +
                              format_double(epsilon_f_prime) + ")");
        if (!(b < 0.0))
            throw DomainError("StrainLifeProps: b must be < 0 (got " + format_double(b) + ")");
        if (!(c < 0.0))
            throw DomainError("StrainLifeProps: c must be < 0 (got " + format_double(c) + ")");
        if (!(c < b))
            throw DomainError("StrainLifeProps: c must be < b (got c=" + format_double(c) +
                              ", b=" + format_double(b) + ")");
    }
};

struct MaterialRecord {
    std::string name;
    std::map<std::string, double> composition; // element -> wt%, metadata only
    ElasticConstants elastic;
    TrilinearCurve monotonic;
    CyclicCurve cyclic;
    StrainLifeProps strain_life;

    void validate() const {
        elastic.validate();
        monotonic.validate();
        cyclic.validate();
        strain_life.validate();
    }
};

/// Built-in Q235 structural steel record.
inline MaterialRecord q235() {
    MaterialRecord m;
    m.name = "Q235";
    m.composition = {{"C", 0.2},  {"Si", 0.35}, {"Mn", 1.4},  {"P", 0.045}, {"S", 0.045},
                     {"Cr", 0.3}, {"Ni", 0.3},  {"Cu", 0.3},  {"N", 0.008}};
    m.elastic = {198000.0, 0.3, 0.5};
    // No intermediate point of the trilinear curve is published for this
    // steel; knee_strain defaults to the yield strain (no plateau).
    m.monotonic = {198000.0, 312.3, 458.0, 0.382, 312.3 / 198000.0};
    m.cyclic = {895.0, 0.125};
    m.strain_life = {1010.0, -0.1113, 2.63, -0.89};
    m.validate();
    return m;
}

inline nlohmann::json material_to_json(const MaterialRecord& m) {
    nlohmann::json j;
    j["name"] = m.name;
    j["composition"] = m.composition;
    j["elastic"] = {{"youngs_modulus", m.elastic.youngs_modulus},
                    {"poisson_elastic", m.elastic.poisson_elastic},
                    {"poisson_plastic", m.elastic.poisson_plastic}};
    j["monotonic"] = {{"youngs_modulus", m.monotonic.youngs_modulus},
                      {"yield_strength", m.monotonic.yield_strength},
                      {"ultimate_strength", m.monotonic.ultimate_strength},
                      {"elongation", m.monotonic.elongation},
                      {"knee_strain", m.monotonic.knee_strain}};
    j["cyclic"] = {{"k_prime", m.cyclic.k_prime}, {"n_prime", m.cyclic.n_prime}};
    j["strain_life"] = {{"sigma_f_prime", m.strain_life.sigma_f_prime},
                        {"b", m.strain_life.b},
                        {"epsilon_f_prime", m.strain_life.epsilon_f_prime},
                        {"c", m.strain_life.c}};
    return j;
}

namespace detail {

inline double json_number(const nlohmann::json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) throw ParseError("material: missing field " + path);
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ParseError("material: field " + path + " must be a number");
    return v.get<double>();
}

} // namespace detail

inline MaterialRecord material_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("material: document must be a JSON object");
    MaterialRecord m;
    m.name = j.value("name", std::string("unnamed"));
    if (j.contains("composition")) {
        if (!j.at("composition").is_object())
            throw ParseError("material: field composition must be an object");
        for (auto& [k, v] : j.at("composition").items()) {
            if (!v.is_number())
                throw ParseError("material: field composition." + k + " must be a number");
            m.composition[k] = v.get<double>();
        }
    }
    if (!j.contains("elastic")) throw ParseError("material: missing field elastic");
    const auto& je = j.at("elastic");
    m.elastic.youngs_modulus = detail::json_number(je, "youngs_modulus", "elastic.youngs_modulus");
    m.elastic.poisson_elastic = detail::json_number(je, "poisson_elastic", "elastic.poisson_elastic");
    m.elastic.poisson_plastic = detail::json_number(je, "poisson_plastic", "elastic.poisson_plastic");

    if (!j.contains("monotonic")) throw ParseError("material: missing field monotonic");
    const auto& jm = j.at("monotonic");
    m.monotonic.youngs_modulus =
        jm.contains("youngs_modulus")
            ? detail::json_number(jm, "youngs_modulus", "monotonic.youngs_modulus")
            : m.elastic.youngs_modulus;
    m.monotonic.yield_strength = detail::json_number(jm, "yield_strength", "monotonic.yield_strength");
    m.monotonic.ultimate_strength =
        detail::json_number(jm, "ultimate_strength", "monotonic.ultimate_strength");
    m.monotonic.elongation = detail::json_number(jm, "elongation", "monotonic.elongation");
    m.monotonic.knee_strain = jm.contains("knee_strain")
                                  ? detail::json_number(jm, "knee_strain", "monotonic.knee_strain")
                                  : m.monotonic.yield_strain();

    if (!j.contains("cyclic")) throw ParseError("material: missing field cyclic");
    const auto& jc = j.at("cyclic");
    m.cyclic.k_prime = detail::json_number(jc, "k_prime", "cyclic.k_prime");
    m.cyclic.n_prime = detail::json_number(jc, "n_prime", "cyclic.n_prime");

    if (!j.contains("strain_life")) throw ParseError("material: missing field strain_life");
    const auto& js = j.at("strain_life");
    m.strain_life.sigma_f_prime = detail::json_number(js, "sigma_f_prime", "strain_life.sigma_f_prime");
    m.strain_life.b = detail::json_number(js, "b", "strain_life.b");
    m.strain_life.epsilon_f_prime =
        detail::json_number(js, "epsilon_f_prime", "strain_life.epsilon_f_prime");
    m.strain_life.c = detail::json_number(js, "c", "strain_life.c");

    m.validate();
    return m;
}

/// Resolves "Q235" to the built-in record, anything else to a JSON file path.
inline MaterialRecord load_material(const std::string& name_or_path) {
    if (name_or_path == "Q235") return q235();
    std::ifstream in(name_or_path);
    if (!in) throw ParseError("material: cannot open '" + name_or_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("material: invalid JSON in '" + name_or_path + "': " + e.what());
    }
    return material_from_json(j);
}

} // namespace p2c
