#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "pit2crack/errors.hpp"
#include "pit2crack/history.hpp"
#include "pit2crack/material.hpp"
#include "pit2crack/rainflow.hpp"
#include "pit2crack/util.hpp"

namespace p2c {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

/// Combined-strain-criterion constants. For the uniaxial plane-stress case
/// the principal strains obey e3 = e2 = -nu*e1; on the maximum shear plane
/// the engineering shear is gamma_max = e1 - e3 = (1 + nu) e1 and the normal
/// strain is en = (e1 + e3)/2 = (1 - nu) e1 / 2. Requiring the combined
/// criterion to coincide with the plain strain-life curve under these
/// substitutions (elastic term with nu_e, plastic with nu_p) gives
///   C1 = (1 + nu_e) + (1 - nu_e)/2,   C2 = (1 + nu_p) + (1 - nu_p)/2.
struct BrownMillerConstants {
    double c1 = 0.0;
    double c2 = 0.0;
};

inline BrownMillerConstants brown_miller_constants(double nu_e, double nu_p) {
    // nu_e = 0.5 is allowed here (incompressible limit, where both factors
    // collapse) even though material records keep nu_e strictly below 0.5.
    if (!(nu_e >= 0.0 && nu_e <= 0.5))
        throw DomainError("brown_miller_constants: nu_e must satisfy 0 <= nu_e <= 0.5 (got " +
                          format_double(nu_e) + ")");
    if (!(nu_p > 0.0 && nu_p <= 0.5))
        throw DomainError("brown_miller_constants: nu_p must satisfy 0 < nu_p <= 0.5 (got " +
                          format_double(nu_p) + ")");
    return {(1.0 + nu_e) + (1.0 - nu_e) / 2.0, (1.0 + nu_p) + (1.0 - nu_p) / 2.0};
}

/// Candidate plane: unit normal n(theta, phi) plus the in-plane shear
/// direction u(psi). theta is the polar angle from z, phi the azimuth.
struct PlaneOrientation {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    double psi_deg = 0.0;
};

struct PlaneFrame {
    Vec3 n;
    Vec3 u;
};

inline Vec3 plane_normal(double theta_deg, double phi_deg) {
    const double th = deg2rad(theta_deg), ph = deg2rad(phi_deg);
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

/// Deterministic in-plane basis: e1 = normalize(z x n) away from the poles,
/// e1 = x at them; e2 = n x e1; u = cos(psi) e1 + sin(psi) e2.
inline void plane_basis(const Vec3& n, Vec3& e1, Vec3& e2) {
    const double s = std::hypot(n[0], n[1]);
    if (s > 1e-9)
        e1 = {-n[1] / s, n[0] / s, 0.0};
    else
        e1 = {1.0, 0.0, 0.0};
    e2 = cross(n, e1);
}

inline PlaneFrame plane_frame(const PlaneOrientation& o) {
    PlaneFrame f;
    f.n = plane_normal(o.theta_deg, o.phi_deg);
    Vec3 e1, e2;
    plane_basis(f.n, e1, e2);
    const double ps = deg2rad(o.psi_deg);
    const double cp = std::cos(ps), sp = std::sin(ps);
    f.u = {cp * e1[0] + sp * e2[0], cp * e1[1] + sp * e2[1], cp * e1[2] + sp * e2[2]};
    return f;
}

enum class MeanStressCorrection { morrow, none };

/// Critical-plane analysis settings. Plane and shear-direction grids step in
/// degrees and must divide 180. ksur is the surface finish penalty applied
/// to the strain amplitude; nf bounds bracket the life solver, with nf_max
/// doubling as the infinite-life sentinel.
struct AnalysisSettings {
    double plane_step_deg = 10.0;
    double psi_step_deg = 10.0;
    double ksur = 1.0;
    MeanStressCorrection mean_stress_correction = MeanStressCorrection::morrow;
    double nf_min = 0.25;
    double nf_max = 1e12;

    void validate() const {
        auto divides_180 = [](double s) {
            if (!(s > 0.0) || s > 180.0) return false;
            const double q = 180.0 / s;
            return std::abs(q - std::round(q)) < 1e-9;
        };
        if (!divides_180(plane_step_deg))
            throw DomainError("AnalysisSettings: plane_step must divide 180 (got " +
                              format_double(plane_step_deg) + ")");
        if (!divides_180(psi_step_deg))
            throw DomainError("AnalysisSettings: psi_step must divide 180 (got " +
                              format_double(psi_step_deg) + ")");
        if (!(ksur >= 1.0))
            throw DomainError("AnalysisSettings: ksur must be >= 1 (got " + format_double(ksur) + ")");
        if (!(nf_min > 0.0 && nf_max > nf_min))
            throw DomainError("AnalysisSettings: need 0 < nf_min < nf_max");
    }
};

/// Solves the combined strain criterion with Morrow mean-stress correction
///   ksur * lhs = c1 (sigma_f' - sn_mean)/E (2Nf)^b + c2 eps_f' (2Nf)^c
/// for Nf. The right side is strictly decreasing in Nf, so a guarded Newton
/// iteration in log2(2Nf) converges from any bracketing interval. Targets
/// below the curve value at nf_max return nf_max (infinite-life sentinel);
/// targets above the value at nf_min return nf_min.
inline double strain_life_nf(double lhs_amplitude, double sigma_n_mean,
                             const StrainLifeProps& props, double youngs_modulus,
                             const BrownMillerConstants& consts, double ksur = 1.0,
                             double nf_min = 0.25, double nf_max = 1e12) {
    props.validate();
    if (!(lhs_amplitude >= 0.0))
        throw DomainError("strain_life_nf: lhs_amplitude must be >= 0 (got " +
                          format_double(lhs_amplitude) + ")");
    if (!(sigma_n_mean < props.sigma_f_prime))
        throw DomainError("strain_life_nf: Morrow correction invalid, mean normal stress " +
                          format_double(sigma_n_mean) + " MPa >= sigma_f' " +
                          format_double(props.sigma_f_prime) + " MPa");
    if (!(youngs_modulus > 0.0)) throw DomainError("strain_life_nf: youngs_modulus must be > 0");
    if (!(ksur > 0.0)) throw DomainError("strain_life_nf: ksur must be > 0");

    const double el = consts.c1 * (props.sigma_f_prime - sigma_n_mean) / youngs_modulus;
    const double pl = consts.c2 * props.epsilon_f_prime;
    const double target = ksur * lhs_amplitude;
    auto rhs = [&](double log2_x) {
        return el * std::exp2(props.b * log2_x) + pl * std::exp2(props.c * log2_x);
    };

    double ylo = std::log2(2.0 * nf_min), yhi = std::log2(2.0 * nf_max);
    if (target <= rhs(yhi)) return nf_max;
    if (target >= rhs(ylo)) return nf_min;

    const double tol = 1e-12 * std::max(1.0, lhs_amplitude);
    double y = 0.5 * (ylo + yhi);
    for (int it = 0; it < 200; ++it) {
        const double e = el * std::exp2(props.b * y);
        const double p = pl * std::exp2(props.c * y);
        const double g = e + p - target;
        if (std::abs(g) < tol) return std::exp2(y) / 2.0;
        if (g > 0.0) ylo = y;
        else yhi = y;
        const double dg = std::numbers::ln2 * (props.b * e + props.c * p);
        double next = y - g / dg;
        if (!(next > ylo && next < yhi)) next = 0.5 * (ylo + yhi);
        y = next;
    }
    throw NumericalError("strain_life_nf: no convergence after 200 iterations, residual " +
                         format_double(rhs(y) - target));
}

/// Plain strain-life curve (Basquin + Coffin-Manson): the combined
/// criterion with unit constants and no mean-stress correction.
inline double strain_life_basic(double strain_amplitude, const StrainLifeProps& props,
                                double youngs_modulus, double nf_min = 0.25,
                                double nf_max = 1e12) {
    return strain_life_nf(strain_amplitude, 0.0, props, youngs_modulus, {1.0, 1.0}, 1.0, nf_min,
                          nf_max);
}

/// Per-sample resolved plane quantities: engineering shear along u, strain
/// normal to the plane, stress normal to the plane.
struct PlaneHistories {
    std::vector<double> gamma;
    std::vector<double> eps_n;
    std::vector<double> sigma_n;
};

namespace detail {

// Strain tensor contraction weights for stored engineering shears:
// n' eps n = nx^2 exx + ny^2 eyy + nz^2 ezz + nx ny gxy + nx nz gxz + ny nz gyz
inline double normal_strain(const std::array<double, 6>& e, const Vec3& n) {
    return n[0] * n[0] * e[0] + n[1] * n[1] * e[1] + n[2] * n[2] * e[2] + n[0] * n[1] * e[3] +
           n[0] * n[2] * e[4] + n[1] * n[2] * e[5];
}

// 2 u' eps n with eps built from engineering shears.
inline double engineering_shear(const std::array<double, 6>& e, const Vec3& n, const Vec3& u) {
    return 2.0 * (u[0] * n[0] * e[0] + u[1] * n[1] * e[1] + u[2] * n[2] * e[2]) +
           (u[0] * n[1] + u[1] * n[0]) * e[3] + (u[0] * n[2] + u[2] * n[0]) * e[4] +
           (u[1] * n[2] + u[2] * n[1]) * e[5];
}

inline double normal_stress(const std::array<double, 6>& s, const Vec3& n) {
    return n[0] * n[0] * s[0] + n[1] * n[1] * s[1] + n[2] * n[2] * s[2] +
           2.0 * (n[0] * n[1] * s[3] + n[0] * n[2] * s[4] + n[1] * n[2] * s[5]);
}

} // namespace detail

/// Resolves a history onto the plane with unit normal n and in-plane unit
/// direction u: eps_n = n' eps n, gamma = 2 u' eps n (engineering), and
/// sigma_n = n' sigma n per sample.
inline PlaneHistories plane_histories(const StrainHistory& history, const Vec3& n, const Vec3& u) {
    history.validate();
    if (std::abs(norm(n) - 1.0) > 1e-10 || std::abs(norm(u) - 1.0) > 1e-10 ||
        std::abs(dot(n, u)) > 1e-10)
        throw GeometryError("plane_histories: (n, u) must be an orthonormal pair");
    PlaneHistories out;
    out.gamma.reserve(history.samples.size());
    out.eps_n.reserve(history.samples.size());
    out.sigma_n.reserve(history.samples.size());
    for (const auto& s : history.samples) {
        out.eps_n.push_back(detail::normal_strain(s.strain, n));
        out.gamma.push_back(detail::engineering_shear(s.strain, n, u));
        out.sigma_n.push_back(detail::normal_stress(s.stress, n));
    }
    return out;
}

/// One counted cycle on the critical plane with its damage contribution.
struct CycleDamage {
    double d_gamma = 0.0;      // shear strain range
    double d_eps_n = 0.0;      // normal strain range over the cycle window
    double sigma_n_mean = 0.0; // mean normal stress over the cycle window, MPa
    double weight = 0.0;
    double nf = 0.0;
    double damage = 0.0;
    std::size_t i_start = 0;
    std::size_t i_end = 0;
};

struct LifeResult {
    std::string location_id;
    double nf = std::numeric_limits<double>::infinity(); // cycles
    double log10_life = std::numeric_limits<double>::infinity();
    PlaneOrientation critical_plane;
    double damage_per_pass = 0.0;
    std::vector<CycleDamage> cycle_table;

    bool infinite_life() const { return !(damage_per_pass > 0.0); }
};

namespace detail {

struct PlaneDamage {
    double damage = 0.0;
    std::vector<CycleDamage> table;
};

inline PlaneDamage plane_damage(const std::vector<double>& gamma, const std::vector<double>& eps_n,
                                const std::vector<double>& sigma_n, const MaterialRecord& material,
                                const BrownMillerConstants& consts, const AnalysisSettings& s) {
    PlaneDamage out;
    for (const auto& cyc : rainflow(std::span<const double>(gamma))) {
        const auto en = companion_stats(eps_n, cyc.i_start, cyc.i_end);
        const auto sn = companion_stats(sigma_n, cyc.i_start, cyc.i_end);
        const double lhs = 0.5 * cyc.range + 0.5 * en.range;
        const double sn_mean =
            s.mean_stress_correction == MeanStressCorrection::morrow ? sn.mean : 0.0;
        const double nf = strain_life_nf(lhs, sn_mean, material.strain_life,
                                         material.elastic.youngs_modulus, consts, s.ksur, s.nf_min,
                                         s.nf_max);
        const double dmg = cyc.weight / nf;
        out.damage += dmg;
        out.table.push_back(
            {cyc.range, en.range, sn.mean, cyc.weight, nf, dmg, cyc.i_start, cyc.i_end});
    }
    return out;
}

} // namespace detail

/// Critical-plane life of one location. Candidate planes form a fixed-step
/// grid over theta, phi in [0, 180) and shear directions psi in [0, 180).
/// Following the combined-strain criterion, the critical plane is the one
/// carrying the maximum shear strain range; among planes tied on shear
/// range the damage sum decides, and remaining ties go to the smallest
/// (theta, phi, psi) lexicographically, which keeps the result independent
/// of traversal order. Damage on the selected plane accumulates per rainflow
/// cycle of gamma, with the normal strain range and mean normal stress taken
/// over each cycle's sample window. Nf = repeat_count / damage.
inline LifeResult critical_plane_life(const StrainHistory& history, const MaterialRecord& material,
                                      const AnalysisSettings& settings) {
    settings.validate();
    material.validate();
    history.validate();
    const auto consts =
        brown_miller_constants(material.elastic.poisson_elastic, material.elastic.poisson_plastic);
    const std::size_t nsamp = history.samples.size();

    LifeResult res;
    res.location_id = history.location_id;

    double best_range = -1.0;
    double best_damage = -1.0;
    detail::PlaneDamage best_pd;
    PlaneOrientation best_plane;

    std::vector<double> eps_n(nsamp), sigma_n(nsamp), g1(nsamp), g2(nsamp), gamma(nsamp);
    const int n_theta = static_cast<int>(std::round(180.0 / settings.plane_step_deg));
    const int n_psi = static_cast<int>(std::round(180.0 / settings.psi_step_deg));

    for (int it = 0; it < n_theta; ++it) {
        const double theta = it * settings.plane_step_deg;
        for (int ip = 0; ip < n_theta; ++ip) {
            const double phi = ip * settings.plane_step_deg;
            const Vec3 n = plane_normal(theta, phi);
            Vec3 e1, e2;
            plane_basis(n, e1, e2);
            for (std::size_t k = 0; k < nsamp; ++k) {
                const auto& smp = history.samples[k];
                eps_n[k] = detail::normal_strain(smp.strain, n);
                sigma_n[k] = detail::normal_stress(smp.stress, n);
                g1[k] = detail::engineering_shear(smp.strain, n, e1);
                g2[k] = detail::engineering_shear(smp.strain, n, e2);
            }
            for (int iu = 0; iu < n_psi; ++iu) {
                const double psi = iu * settings.psi_step_deg;
                const double cp = std::cos(deg2rad(psi)), sp = std::sin(deg2rad(psi));
                double lo = 0.0, hi = 0.0;
                for (std::size_t k = 0; k < nsamp; ++k) {
                    gamma[k] = cp * g1[k] + sp * g2[k];
                    if (k == 0) {
                        lo = hi = gamma[0];
                    } else {
                        lo = std::min(lo, gamma[k]);
                        hi = std::max(hi, gamma[k]);
                    }
                }
                const double range = hi - lo;
                if (range < best_range) continue;
                auto pd = detail::plane_damage(gamma, eps_n, sigma_n, material, consts, settings);
                if (range > best_range || pd.damage > best_damage) {
                    best_range = range;
                    best_damage = pd.damage;
                    best_pd = std::move(pd);
                    best_plane = {theta, phi, psi};
                }
            }
        }
    }

    res.critical_plane = best_plane;
    res.damage_per_pass = best_damage > 0.0 ? best_damage : 0.0;
    res.cycle_table = std::move(best_pd.table);
    if (res.damage_per_pass > 0.0) {
        res.nf = history.repeat_count / res.damage_per_pass;
        res.log10_life = std::log10(res.nf);
    }
    return res;
}

struct LifeField {
    std::vector<LifeResult> results; // input order
    std::size_t worst_index = 0;
};

/// Per-location lives plus the minimum-life location (the crack-initiation
/// site analogue). Locations are independent, so they may be processed in
/// parallel; results and the worst pick do not depend on the thread count.
inline LifeField life_field(const std::vector<StrainHistory>& histories,
                            const MaterialRecord& material, const AnalysisSettings& settings,
                            int jobs = 1) {
    if (histories.empty()) throw DomainError("life_field: needs at least one history");
    LifeField out;
    out.results.resize(histories.size());

    std::vector<std::string> errors(histories.size());
    auto run = [&](std::size_t i) {
        try {
            out.results[i] = critical_plane_life(histories[i], material, settings);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < histories.size(); ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t workers = std::min<std::size_t>(jobs, histories.size());
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < histories.size();
                     i = next.fetch_add(1))
                    run(i);
            });
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < histories.size(); ++i)
        if (!errors[i].empty())
            throw Error("life_field: location '" + histories[i].location_id + "': " + errors[i]);

    for (std::size_t i = 1; i < out.results.size(); ++i) {
        const auto& cur = out.results[i];
        const auto& best = out.results[out.worst_index];
        if (cur.nf < best.nf ||
            (cur.nf == best.nf && cur.location_id < best.location_id))
            out.worst_index = i;
    }
    return out;
}

/// Finds the surface finish factor that makes the critical-plane life of
/// `history` hit target_nf. Life is strictly decreasing in ksur, so plain
/// bisection on an expanding bracket suffices.
inline double calibrate_ksur(double target_nf, const StrainHistory& history,
                             const MaterialRecord& material, AnalysisSettings settings,
                             double lo = 1.0, double hi = 4.0) {
    if (!(target_nf > 0.0)) throw DomainError("calibrate_ksur: target_nf must be > 0");
    auto life_at = [&](double k) {
        settings.ksur = k;
        return critical_plane_life(history, material, settings).nf;
    };
    if (life_at(lo) < target_nf)
        throw DomainError("calibrate_ksur: life at ksur = " + format_double(lo) +
                          " is already below the target");
    int guard = 0;
    while (life_at(hi) > target_nf) {
        hi *= 2.0;
        if (++guard > 20)
            throw NumericalError("calibrate_ksur: cannot bracket the target life");
    }
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double nf = life_at(mid);
        if (std::abs(nf - target_nf) <= 1e-9 * target_nf) return mid;
        if (nf > target_nf)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace p2c
