#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pit2crack/errors.hpp"
#include "pit2crack/heightfield.hpp"
#include "pit2crack/rng.hpp"
#include "pit2crack/util.hpp"

namespace p2c {

/// Cutting sphere. cz is the depth of the sphere centre below the intact
/// surface plane (negative = centre above the surface), in um.
struct SphericalCap {
    double cx = 0.0;
    double cy = 0.0;
    double cz = 0.0;
    double r = 0.0;

    void validate() const {
        if (!(r > 0.0))
            throw DomainError("SphericalCap: r must be > 0 (got " + format_double(r) + ")");
    }
};

/// Removes the material inside the sphere from the current surface.
/// At a column at horizontal distance rho <= r the sphere occupies depths
/// [cz - s, cz + s] with s = sqrt(r^2 - rho^2). The cut applies only where
/// the sphere reaches up to the current surface (cz - s <= old depth); a
/// sphere fully buried below the surface cannot be represented by a
/// heightfield and is a no-op there.
inline void cut_cap_inplace(HeightField& field, const SphericalCap& cap) {
    cap.validate();
    const int i_lo = std::max(0, static_cast<int>(std::ceil((cap.cx - cap.r) / field.dx)));
    const int i_hi = std::min(field.nx - 1, static_cast<int>(std::floor((cap.cx + cap.r) / field.dx)));
    const int j_lo = std::max(0, static_cast<int>(std::ceil((cap.cy - cap.r) / field.dy)));
    const int j_hi = std::min(field.ny - 1, static_cast<int>(std::floor((cap.cy + cap.r) / field.dy)));
    const double r2 = cap.r * cap.r;
    for (int j = j_lo; j <= j_hi; ++j) {
        const double py = field.y(j) - cap.cy;
        for (int i = i_lo; i <= i_hi; ++i) {
            const double px = field.x(i) - cap.cx;
            const double rho2 = px * px + py * py;
            if (rho2 > r2) continue;
            const double s = std::sqrt(r2 - rho2);
            double& old = field.at(i, j);
            if (cap.cz - s > old) continue; // sphere fully below current surface
            old = std::max(0.0, std::max(old, cap.cz + s));
        }
    }
}

inline HeightField cut_cap(const HeightField& field, const SphericalCap& cap) {
    field.validate();
    HeightField out = field;
    cut_cap_inplace(out, cap);
    return out;
}

/// Sampling distribution for pit radii (um).
struct RadiusDist {
    enum class Kind { fixed, uniform, lognormal };
    Kind kind = Kind::lognormal;
    double a = 0.0; // fixed: value; uniform: min; lognormal: median
    double b = 0.0; // uniform: max; lognormal: sigma_log

    double sample(SplitMix64& rng) const {
        switch (kind) {
            case Kind::fixed: return a;
            case Kind::uniform: return rng.uniform(a, b);
            case Kind::lognormal: return rng.lognormal(a, b);
        }
        return a;
    }

    void validate(const std::string& path) const {
        switch (kind) {
            case Kind::fixed:
                if (!(a > 0.0)) throw DomainError(path + ": fixed radius must be > 0");
                break;
            case Kind::uniform:
                if (!(a > 0.0) || !(b >= a))
                    throw DomainError(path + ": uniform radius needs 0 < min <= max");
                break;
            case Kind::lognormal:
                if (!(a > 0.0)) throw DomainError(path + ": lognormal median must be > 0");
                if (!(b >= 0.0)) throw DomainError(path + ": lognormal sigma_log must be >= 0");
                break;
        }
    }
};

/// Pit count per level: fixed value or uniform integer range, inclusive.
struct CountDist {
    std::int64_t lo = 1;
    std::int64_t hi = 1;

    std::int64_t sample(SplitMix64& rng) const {
        return lo == hi ? lo : rng.uniform_int(lo, hi);
    }

    void validate(const std::string& path) const {
        if (lo < 0 || hi < lo) throw DomainError(path + ": pit_count needs 0 <= min <= max");
    }
};

enum class CenterRule { anywhere, within_footprint, fixed };

struct LevelSpec {
    CountDist pit_count;
    RadiusDist radius_dist;
    CenterRule center_rule = CenterRule::anywhere;
    double center_x = 0.0; // used by CenterRule::fixed
    double center_y = 0.0;
    double center_depth_fraction = 0.0; // f in [-1, 1]; cz = local depth + f*r
};

struct HierarchySpec {
    std::vector<LevelSpec> levels;
    double patch_x = 4000.0; // um
    double patch_y = 4000.0;
    int nx = 201;
    int ny = 201;
    std::uint64_t seed = 0;

    double dx() const { return patch_x / (nx - 1); }
    double dy() const { return patch_y / (ny - 1); }

    void validate() const {
        if (levels.empty()) throw DomainError("HierarchySpec: needs at least one level");
        if (!(patch_x > 0.0) || !(patch_y > 0.0))
            throw DomainError("HierarchySpec: patch_size must be > 0");
        if (nx < 2 || ny < 2) throw DomainError("HierarchySpec: grid must be at least 2x2");
        for (size_t li = 0; li < levels.size(); ++li) {
            const auto& lv = levels[li];
            const std::string path = "levels[" + std::to_string(li) + "]";
            lv.pit_count.validate(path + ".pit_count");
            lv.radius_dist.validate(path + ".radius_dist");
            if (!(lv.center_depth_fraction >= -1.0 && lv.center_depth_fraction <= 1.0))
                throw DomainError(path + ".center_depth_fraction: must be in [-1, 1]");
            if (li == 0 && lv.center_rule == CenterRule::within_footprint)
                throw DomainError(path + ".center_rule: level 1 must place pits anywhere in the patch");
            if (li > 0 && lv.center_rule == CenterRule::anywhere)
                throw DomainError(path + ".center_rule: levels >= 2 must place sub-pits "
                                  "within the existing pit footprint");
            if (lv.center_rule == CenterRule::fixed) {
                if (!(lv.center_x >= 0.0 && lv.center_x <= patch_x && lv.center_y >= 0.0 &&
                      lv.center_y <= patch_y))
                    throw DomainError(path + ".center: fixed center must lie inside the patch");
            }
        }
    }
};

struct CapRecord {
    int level = 0; // 1-based
    SphericalCap cap;
};

struct GenerateResult {
    HeightField field;
    std::vector<CapRecord> caps;
};

/// Hierarchical stochastic cutting. Level 1 places caps anywhere in the
/// patch; each deeper level samples its centres uniformly from the columns
/// that were already pitted when the level started, so sub-pits roughen the
/// surface carved by the levels above them. The sphere centre sits at
/// f * r relative to the local surface depth at the chosen centre.
///
/// Draw order per cap is fixed (centre, then radius) so a seed fully
/// determines the output.
inline GenerateResult generate_pit(const HierarchySpec& spec) {
    spec.validate();
    GenerateResult res;
    res.field = HeightField::flat(spec.nx, spec.ny, spec.dx(), spec.dy());
    SplitMix64 rng(spec.seed);

    for (size_t li = 0; li < spec.levels.size(); ++li) {
        const LevelSpec& lv = spec.levels[li];
        const std::int64_t count = lv.pit_count.sample(rng);

        // Footprint snapshot at level start: sub-pits of this level are all
        // seeded in the surface generated by the previous levels.
        std::vector<std::int32_t> footprint;
        if (lv.center_rule == CenterRule::within_footprint) {
            for (size_t k = 0; k < res.field.depth.size(); ++k)
                if (res.field.depth[k] > 0.0) footprint.push_back(static_cast<std::int32_t>(k));
            if (footprint.empty() && count > 0)
                throw GenerationError("generate_pit: level " + std::to_string(li + 1) +
                                      " requires an existing pit footprint but the surface is flat");
        }

        for (std::int64_t k = 0; k < count; ++k) {
            double cx = 0.0, cy = 0.0;
            switch (lv.center_rule) {
                case CenterRule::anywhere:
                    cx = rng.uniform(0.0, spec.patch_x);
                    cy = rng.uniform(0.0, spec.patch_y);
                    break;
                case CenterRule::within_footprint: {
                    const auto idx = footprint[static_cast<size_t>(
                        rng.uniform_int(0, static_cast<std::int64_t>(footprint.size()) - 1))];
                    cx = res.field.x(idx % spec.nx);
                    cy = res.field.y(idx / spec.nx);
                    break;
                }
                case CenterRule::fixed:
                    cx = lv.center_x;
                    cy = lv.center_y;
                    break;
            }
            const double r = lv.radius_dist.sample(rng);
            const int ci = std::clamp(static_cast<int>(std::lround(cx / res.field.dx)), 0, spec.nx - 1);
            const int cj = std::clamp(static_cast<int>(std::lround(cy / res.field.dy)), 0, spec.ny - 1);
            const double local = res.field.at(ci, cj);
            SphericalCap cap{cx, cy, local + lv.center_depth_fraction * r, r};
            cut_cap_inplace(res.field, cap);
            res.caps.push_back({static_cast<int>(li + 1), cap});
        }
    }
    return res;
}

enum class LoadAxis { x, y };

constexpr double kDefaultDepthThreshold = 0.5; // um

/// Pit size and roughness metrics. w is the footprint extent transverse to
/// the load axis, l the extent along it; Ra is the mean absolute deviation
/// of depth from its mean over the footprint.
struct PitMetrics {
    double d = 0.0;              // max depth, um
    double w = 0.0;              // um
    double l = 0.0;              // um
    double ra = 0.0;             // um
    double footprint_area = 0.0; // um^2
};

inline PitMetrics measure(const HeightField& field, LoadAxis load_axis,
                          double depth_threshold = kDefaultDepthThreshold) {
    field.validate();
    PitMetrics m;
    int i_min = field.nx, i_max = -1, j_min = field.ny, j_max = -1;
    std::int64_t count = 0;
    double sum = 0.0;
    for (int j = 0; j < field.ny; ++j)
        for (int i = 0; i < field.nx; ++i) {
            const double v = field.at(i, j);
            m.d = std::max(m.d, v);
            if (v > depth_threshold) {
                ++count;
                sum += v;
                i_min = std::min(i_min, i);
                i_max = std::max(i_max, i);
                j_min = std::min(j_min, j);
                j_max = std::max(j_max, j);
            }
        }
    if (count == 0) return PitMetrics{}; // empty footprint: all zeros
    const double mean = sum / static_cast<double>(count);
    double abs_dev = 0.0;
    for (int j = j_min; j <= j_max; ++j)
        for (int i = i_min; i <= i_max; ++i)
            if (field.at(i, j) > depth_threshold) abs_dev += std::abs(field.at(i, j) - mean);
    m.ra = abs_dev / static_cast<double>(count);
    const double ext_x = (i_max - i_min + 1) * field.dx;
    const double ext_y = (j_max - j_min + 1) * field.dy;
    m.l = load_axis == LoadAxis::x ? ext_x : ext_y;
    m.w = load_axis == LoadAxis::x ? ext_y : ext_x;
    m.footprint_area = static_cast<double>(count) * field.dx * field.dy;
    return m;
}

/// Half-ellipsoid of revolution: depth(x, y) = d * sqrt(1 - (2 rho / D)^2)
/// centred in the patch, zero outside the footprint circle of diameter D.
inline HeightField ellipsoid_field(double d, double D, int nx, int ny, double dx, double dy) {
    if (!(d > 0.0) || !(D > 0.0))
        throw DomainError("ellipsoid_field: d and D must be > 0");
    HeightField f = HeightField::flat(nx, ny, dx, dy);
    if (D > std::min(f.extent_x(), f.extent_y()))
        throw DimensionError("ellipsoid_field: diameter " + format_double(D) +
                             " um exceeds the patch extent " +
                             format_double(std::min(f.extent_x(), f.extent_y())) + " um");
    const double cx = f.extent_x() / 2.0;
    const double cy = f.extent_y() / 2.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double px = f.x(i) - cx;
            const double py = f.y(j) - cy;
            const double t = 1.0 - 4.0 * (px * px + py * py) / (D * D);
            if (t > 0.0) f.at(i, j) = d * std::sqrt(t);
        }
    return f;
}

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0; // population
    double min = 0.0;
    double max = 0.0;
};

struct BatchSummary {
    std::vector<std::uint64_t> seeds;
    std::vector<PitMetrics> samples;
    MetricStats d, w, l, ra, footprint_area;
};

namespace detail {

inline MetricStats stats_of(const std::vector<PitMetrics>& samples, double PitMetrics::*field) {
    MetricStats s;
    const auto n = static_cast<double>(samples.size());
    s.min = samples.front().*field;
    s.max = s.min;
    for (const auto& m : samples) {
        const double v = m.*field;
        s.mean += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean /= n;
    double ss = 0.0;
    for (const auto& m : samples) {
        const double e = m.*field - s.mean;
        ss += e * e;
    }
    s.stddev = std::sqrt(ss / n);
    return s;
}

} // namespace detail

/// Monte-Carlo harness over independent seeds derived from seed_stream.
/// Sample i always uses SplitMix64::derive_stream(seed_stream, i), so the
/// result is reproducible and independent of the number of worker threads.
inline BatchSummary batch_generate(const HierarchySpec& spec, int n_samples,
                                   std::uint64_t seed_stream, LoadAxis load_axis = LoadAxis::x,
                                   int jobs = 1,
                                   double depth_threshold = kDefaultDepthThreshold) {
    if (n_samples < 1) throw DomainError("batch_generate: n_samples must be >= 1");
    spec.validate();
    BatchSummary out;
    out.seeds.resize(n_samples);
    out.samples.resize(n_samples);
    for (int i = 0; i < n_samples; ++i)
        out.seeds[i] = SplitMix64::derive_stream(seed_stream, static_cast<std::uint64_t>(i));

    std::vector<std::string> errors(n_samples);
    auto run_sample = [&](int i) {
        try {
            HierarchySpec s = spec;
            s.seed = out.seeds[i];
            out.samples[i] = measure(generate_pit(s).field, load_axis, depth_threshold);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };

    if (jobs <= 1) {
        for (int i = 0; i < n_samples; ++i) run_sample(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int workers = std::min(jobs, n_samples);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n_samples; i = next.fetch_add(1)) run_sample(i);
            });
        for (auto& t : pool) t.join();
    }
    for (int i = 0; i < n_samples; ++i)
        if (!errors[i].empty())
            throw GenerationError("batch_generate: sample " + std::to_string(i) + " (seed " +
                                  std::to_string(out.seeds[i]) + ") failed: " + errors[i]);

    out.d = detail::stats_of(out.samples, &PitMetrics::d);
    out.w = detail::stats_of(out.samples, &PitMetrics::w);
    out.l = detail::stats_of(out.samples, &PitMetrics::l);
    out.ra = detail::stats_of(out.samples, &PitMetrics::ra);
    out.footprint_area = detail::stats_of(out.samples, &PitMetrics::footprint_area);
    return out;
}

/// Cap log CSV: one row per applied cap, in application order.
inline std::string caps_to_csv(const std::vector<CapRecord>& caps) {
    std::string out = "level,cx,cy,cz,r\n";
    for (const auto& c : caps) {
        out += std::to_string(c.level);
        out.push_back(',');
        out += format_double(c.cap.cx);
        out.push_back(',');
        out += format_double(c.cap.cy);
        out.push_back(',');
        out += format_double(c.cap.cz);
        out.push_back(',');
        out += format_double(c.cap.r);
        out.push_back('\n');
    }
    return out;
}

// ---- JSON config ----------------------------------------------------------

namespace detail {

[[noreturn]] inline void config_error(const std::string& path, const std::string& what) {
    throw ParseError("config error at " + path + ": " + what);
}

inline const nlohmann::json& config_field(const nlohmann::json& obj, const char* key,
                                          const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) config_error(path, "field is missing");
    return obj.at(key);
}

inline double config_number(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) config_error(path, "must be a number");
    return v.get<double>();
}

} // namespace detail

/// Parses a HierarchySpec config document. Validation failures cite the
/// JSON path of the offending field, e.g. "levels[0].radius_dist".
inline HierarchySpec hierarchy_from_json(const nlohmann::json& j) {
    using detail::config_error;
    if (!j.is_object()) throw ParseError("config error at $: document must be a JSON object");
    HierarchySpec spec;

    const auto& patch = detail::config_field(j, "patch_size", "patch_size");
    if (!patch.is_array() || patch.size() != 2) config_error("patch_size", "must be [Lx, Ly]");
    spec.patch_x = detail::config_number(patch[0], "patch_size[0]");
    spec.patch_y = detail::config_number(patch[1], "patch_size[1]");

    const auto& grid = detail::config_field(j, "grid", "grid");
    if (!grid.is_array() || grid.size() != 2) config_error("grid", "must be [nx, ny]");
    if (!grid[0].is_number_integer() || !grid[1].is_number_integer())
        config_error("grid", "nx and ny must be integers");
    spec.nx = grid[0].get<int>();
    spec.ny = grid[1].get<int>();

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            config_error("seed", "must be an integer");
        spec.seed = j.at("seed").get<std::uint64_t>();
    }

    const auto& levels = detail::config_field(j, "levels", "levels");
    if (!levels.is_array() || levels.empty()) config_error("levels", "must be a non-empty array");
    for (size_t li = 0; li < levels.size(); ++li) {
        const std::string path = "levels[" + std::to_string(li) + "]";
        const auto& jl = levels[li];
        if (!jl.is_object()) config_error(path, "must be an object");
        LevelSpec lv;

        const auto& jc = detail::config_field(jl, "pit_count", path + ".pit_count");
        if (jc.is_number_integer()) {
            lv.pit_count.lo = lv.pit_count.hi = jc.get<std::int64_t>();
        } else if (jc.is_object()) {
            lv.pit_count.lo =
                static_cast<std::int64_t>(detail::config_number(detail::config_field(jc, "min", path + ".pit_count.min"), path + ".pit_count.min"));
            lv.pit_count.hi =
                static_cast<std::int64_t>(detail::config_number(detail::config_field(jc, "max", path + ".pit_count.max"), path + ".pit_count.max"));
        } else {
            config_error(path + ".pit_count", "must be an integer or {min, max}");
        }

        const auto& jr = detail::config_field(jl, "radius_dist", path + ".radius_dist");
        if (!jr.is_object()) config_error(path + ".radius_dist", "must be an object");
        const auto& jt = detail::config_field(jr, "type", path + ".radius_dist.type");
        const std::string type = jt.is_string() ? jt.get<std::string>() : std::string();
        if (type == "fixed") {
            lv.radius_dist.kind = RadiusDist::Kind::fixed;
            lv.radius_dist.a = detail::config_number(detail::config_field(jr, "value", path + ".radius_dist.value"), path + ".radius_dist.value");
        } else if (type == "uniform") {
            lv.radius_dist.kind = RadiusDist::Kind::uniform;
            lv.radius_dist.a = detail::config_number(detail::config_field(jr, "min", path + ".radius_dist.min"), path + ".radius_dist.min");
            lv.radius_dist.b = detail::config_number(detail::config_field(jr, "max", path + ".radius_dist.max"), path + ".radius_dist.max");
        } else if (type == "lognormal") {
            lv.radius_dist.kind = RadiusDist::Kind::lognormal;
            lv.radius_dist.a = detail::config_number(detail::config_field(jr, "median", path + ".radius_dist.median"), path + ".radius_dist.median");
            lv.radius_dist.b = detail::config_number(detail::config_field(jr, "sigma_log", path + ".radius_dist.sigma_log"), path + ".radius_dist.sigma_log");
        } else {
            config_error(path + ".radius_dist.type", "must be one of fixed, uniform, lognormal");
        }
        try {
            lv.radius_dist.validate(path + ".radius_dist");
        } catch (const DomainError& e) {
            throw ParseError("config error at " + std::string(e.what()));
        }

        if (jl.contains("center_fixed")) {
            const auto& jf = jl.at("center_fixed");
            if (!jf.is_array() || jf.size() != 2) config_error(path + ".center_fixed", "must be [x, y]");
            lv.center_rule = CenterRule::fixed;
            lv.center_x = detail::config_number(jf[0], path + ".center_fixed[0]");
            lv.center_y = detail::config_number(jf[1], path + ".center_fixed[1]");
        } else {
            lv.center_rule = li == 0 ? CenterRule::anywhere : CenterRule::within_footprint;
        }
        if (jl.contains("center_depth_fraction"))
            lv.center_depth_fraction =
                detail::config_number(jl.at("center_depth_fraction"), path + ".center_depth_fraction");

        spec.levels.push_back(lv);
    }

    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw ParseError("config error at " + std::string(e.what()));
    }
    return spec;
}

/// Fully-resolved echo of a spec, suitable for run manifests.
inline nlohmann::json hierarchy_to_json(const HierarchySpec& spec) {
    nlohmann::json j;
    j["patch_size"] = {spec.patch_x, spec.patch_y};
    j["grid"] = {spec.nx, spec.ny};
    j["seed"] = spec.seed;
    j["levels"] = nlohmann::json::array();
    for (const auto& lv : spec.levels) {
        nlohmann::json jl;
        if (lv.pit_count.lo == lv.pit_count.hi)
            jl["pit_count"] = lv.pit_count.lo;
        else
            jl["pit_count"] = {{"min", lv.pit_count.lo}, {"max", lv.pit_count.hi}};
        switch (lv.radius_dist.kind) {
            case RadiusDist::Kind::fixed:
                jl["radius_dist"] = {{"type", "fixed"}, {"value", lv.radius_dist.a}};
                break;
            case RadiusDist::Kind::uniform:
                jl["radius_dist"] = {{"type", "uniform"}, {"min", lv.radius_dist.a}, {"max", lv.radius_dist.b}};
                break;
            case RadiusDist::Kind::lognormal:
                jl["radius_dist"] = {{"type", "lognormal"}, {"median", lv.radius_dist.a}, {"sigma_log", lv.radius_dist.b}};
                break;
        }
        switch (lv.center_rule) {
            case CenterRule::anywhere: jl["center_rule"] = "anywhere"; break;
            case CenterRule::within_footprint: jl["center_rule"] = "within-footprint"; break;
            case CenterRule::fixed:
                jl["center_rule"] = "fixed";
                jl["center_fixed"] = {lv.center_x, lv.center_y};
                break;
        }
        jl["center_depth_fraction"] = lv.center_depth_fraction;
        j["levels"].push_back(jl);
    }
    return j;
}

/// Out-of-the-box two-level recipe; the distributions stand in for the
/// unpublished ones of the underlying field measurements and are expected
/// to be overridden per study.
inline HierarchySpec default_hierarchy_spec() {
    HierarchySpec spec;
    spec.patch_x = 4000.0;
    spec.patch_y = 4000.0;
    spec.nx = 201; // 20 um spacing
    spec.ny = 201;
    spec.seed = 1;
    LevelSpec l1;
    l1.pit_count = {1, 3};
    l1.radius_dist = {RadiusDist::Kind::lognormal, 1000.0, 0.3};
    l1.center_rule = CenterRule::anywhere;
    LevelSpec l2;
    l2.pit_count = {5, 12};
    l2.radius_dist = {RadiusDist::Kind::lognormal, 300.0, 0.3};
    l2.center_rule = CenterRule::within_footprint;
    spec.levels = {l1, l2};
    return spec;
}

} // namespace p2c
