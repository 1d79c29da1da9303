#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "pit2crack/errors.hpp"
#include "pit2crack/material.hpp"
#include "pit2crack/util.hpp"

namespace p2c {

/// One load step at one location. Strain order: exx, eyy, ezz, gxy, gxz,
/// gyz with shears in ENGINEERING convention (gamma = 2 * tensor shear).
/// Stress order: sxx, syy, szz, txy, txz, tyz in MPa.
struct TensorSample {
    std::array<double, 6> strain{};
    std::array<double, 6> stress{};

    void validate() const {
        for (double v : strain)
            if (!std::isfinite(v)) throw DomainError("TensorSample: non-finite strain component");
        for (double v : stress)
            if (!std::isfinite(v)) throw DomainError("TensorSample: non-finite stress component");
    }
};

/// Time-ordered stress/strain history at one location. repeat_count is the
/// number of load cycles one pass of the sample block represents, so
/// reported lives stay in cycles for multi-cycle blocks.
struct StrainHistory {
    std::string location_id;
    std::vector<TensorSample> samples;
    double repeat_count = 1.0;

    void validate() const {
        if (samples.size() < 2)
            throw DomainError("StrainHistory '" + location_id + "': needs at least 2 samples");
        if (!(repeat_count > 0.0))
            throw DomainError("StrainHistory '" + location_id + "': repeat_count must be > 0");
        for (const auto& s : samples) s.validate();
    }
};

constexpr std::array<const char*, 14> kHistoryCsvColumns = {
    "location_id", "step", "exx", "eyy", "ezz", "gxy", "gxz",
    "gyz",         "sxx",  "syy", "szz", "txy", "txz", "tyz"};

/// Parses the history CSV interchange format. Rows are grouped by
/// location_id and ordered by step; histories appear in order of first
/// appearance. Errors cite the 1-based file line.
inline std::vector<StrainHistory> parse_history_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines[0]).empty())
        throw ParseError("history csv: missing header row");

    const auto header = split_csv(lines[0]);
    std::array<int, 14> col{};
    col.fill(-1);
    for (size_t h = 0; h < header.size(); ++h)
        for (size_t c = 0; c < kHistoryCsvColumns.size(); ++c)
            if (header[h] == kHistoryCsvColumns[c]) {
                if (col[c] != -1)
                    throw ParseError("history csv row 1: duplicate column '" +
                                     std::string(kHistoryCsvColumns[c]) + "'");
                col[c] = static_cast<int>(h);
            }
    for (size_t c = 0; c < kHistoryCsvColumns.size(); ++c)
        if (col[c] == -1)
            throw ParseError("history csv row 1: missing column '" +
                             std::string(kHistoryCsvColumns[c]) + "'");

    struct Row {
        double step;
        TensorSample sample;
    };
    std::vector<std::string> order;
    std::map<std::string, std::vector<Row>> groups;

    for (size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const std::string where = "history csv row " + std::to_string(ln + 1);
        const auto cells = split_csv(lines[ln]);
        if (cells.size() != header.size())
            throw ParseError(where + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(cells.size()));
        const std::string loc(cells[col[0]]);
        if (loc.empty()) throw ParseError(where + ": empty location_id");
        Row row;
        row.step = parse_double(cells[col[1]], where + ", column 'step'");
        for (int c = 2; c < 8; ++c)
            row.sample.strain[c - 2] =
                parse_double(cells[col[c]], where + ", column '" + kHistoryCsvColumns[c] + "'");
        for (int c = 8; c < 14; ++c)
            row.sample.stress[c - 8] =
                parse_double(cells[col[c]], where + ", column '" + kHistoryCsvColumns[c] + "'");

        auto [it, fresh] = groups.try_emplace(loc);
        if (fresh) order.push_back(loc);
        for (const auto& existing : it->second)
            if (existing.step == row.step)
                throw ParseError(where + ": duplicate (location_id, step) = ('" + loc + "', " +
                                 format_double(row.step) + ")");
        it->second.push_back(row);
    }

    std::vector<StrainHistory> out;
    for (const auto& loc : order) {
        auto& rows = groups[loc];
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.step < b.step; });
        StrainHistory h;
        h.location_id = loc;
        for (const auto& r : rows) h.samples.push_back(r.sample);
        if (h.samples.size() < 2)
            throw ParseError("history csv: location '" + loc + "' has only " +
                             std::to_string(h.samples.size()) + " sample(s); need at least 2");
        out.push_back(std::move(h));
    }
    return out;
}

inline std::string history_to_csv(const std::vector<StrainHistory>& histories) {
    std::string out;
    for (size_t c = 0; c < kHistoryCsvColumns.size(); ++c) {
        if (c) out.push_back(',');
        out += kHistoryCsvColumns[c];
    }
    out.push_back('\n');
    for (const auto& h : histories)
        for (size_t k = 0; k < h.samples.size(); ++k) {
            out += h.location_id;
            out.push_back(',');
            out += std::to_string(k);
            for (double v : h.samples[k].strain) {
                out.push_back(',');
                out += format_double(v);
            }
            for (double v : h.samples[k].stress) {
                out.push_back(',');
                out += format_double(v);
            }
            out.push_back('\n');
        }
    return out;
}

/// Elastic constant-amplitude uniaxial driver: a triangular stress wave
/// between smax and smin along x with sxx = s, exx = s/E and the elastic
/// Poisson contraction in y and z. Each cycle starts at smax; the block
/// holds n_cycles cycles plus the closing peak sample, and repeat_count is
/// set to n_cycles so downstream lives come out in cycles.
///
/// points_per_cycle must be even so both extremes are sampled exactly.
inline StrainHistory uniaxial_history(double smax, double smin, const MaterialRecord& material,
                                      int points_per_cycle, int n_cycles) {
    material.validate();
    if (!(smax >= smin))
        throw DomainError("uniaxial_history: smax must be >= smin (got " + format_double(smax) +
                          " < " + format_double(smin) + ")");
    const double sy = material.monotonic.yield_strength;
    if (std::max(std::abs(smax), std::abs(smin)) > sy)
        throw DomainError("uniaxial_history: stress exceeds the yield strength " +
                          format_double(sy) + " MPa; this driver is elastic-only");
    if (points_per_cycle < 2 || points_per_cycle % 2 != 0)
        throw DomainError("uniaxial_history: points_per_cycle must be even and >= 2");
    if (n_cycles < 1) throw DomainError("uniaxial_history: n_cycles must be >= 1");

    const double E = material.elastic.youngs_modulus;
    const double nu = material.elastic.poisson_elastic;
    StrainHistory h;
    h.location_id = "uniaxial";
    h.repeat_count = n_cycles;
    const int half = points_per_cycle / 2;
    const int total = points_per_cycle * n_cycles + 1;
    h.samples.reserve(total);
    for (int k = 0; k < total; ++k) {
        const int phase = k % points_per_cycle;
        double s;
        if (phase <= half)
            s = smax + (smin - smax) * static_cast<double>(phase) / half;
        else
            s = smin + (smax - smin) * static_cast<double>(phase - half) / half;
        TensorSample ts;
        ts.stress[0] = s;
        ts.strain[0] = s / E;
        ts.strain[1] = -nu * s / E;
        ts.strain[2] = -nu * s / E;
        h.samples.push_back(ts);
    }
    return h;
}

} // namespace p2c
