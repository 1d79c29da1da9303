#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "pit2crack/errors.hpp"
#include "pit2crack/util.hpp"

namespace p2c {

/// Discretized pit depth map over a rectangular surface patch. Depth is
/// measured downward from the intact surface plane z = 0, in micrometres,
/// and is always >= 0. Column (i, j) sits at (i*dx, j*dy); storage is
/// row-major with j as the row index.
struct HeightField {
    int nx = 0;
    int ny = 0;
    double dx = 0.0; // um
    double dy = 0.0; // um
    std::vector<double> depth;

    static HeightField flat(int nx, int ny, double dx, double dy) {
        HeightField f;
        f.nx = nx;
        f.ny = ny;
        f.dx = dx;
        f.dy = dy;
        f.depth.assign(static_cast<size_t>(nx) * ny, 0.0);
        f.validate();
        return f;
    }

    double& at(int i, int j) { return depth[static_cast<size_t>(j) * nx + i]; }
    double at(int i, int j) const { return depth[static_cast<size_t>(j) * nx + i]; }

    double x(int i) const { return i * dx; }
    double y(int j) const { return j * dy; }
    double extent_x() const { return (nx - 1) * dx; }
    double extent_y() const { return (ny - 1) * dy; }

    double max_depth() const {
        return depth.empty() ? 0.0 : *std::max_element(depth.begin(), depth.end());
    }

    void validate() const {
        if (nx < 2 || ny < 2)
            throw DomainError("HeightField: nx and ny must be >= 2 (got " + std::to_string(nx) +
                              "x" + std::to_string(ny) + ")");
        if (!(dx > 0.0) || !(dy > 0.0))
            throw DomainError("HeightField: dx and dy must be > 0");
        if (depth.size() != static_cast<size_t>(nx) * ny)
            throw DomainError("HeightField: depth array has " + std::to_string(depth.size()) +
                              " entries, expected " + std::to_string(static_cast<size_t>(nx) * ny));
        for (double v : depth)
            if (!(std::isfinite(v) && v >= 0.0))
                throw DomainError("HeightField: depth values must be finite and >= 0");
    }
};

/// CSV matrix, one row per j line, values in um.
inline std::string heightfield_to_csv(const HeightField& f) {
    std::string out;
    out.reserve(f.depth.size() * 8);
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            if (i) out.push_back(',');
            out += format_double(f.at(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

inline HeightField heightfield_from_csv(std::string_view text, double dx, double dy) {
    HeightField f;
    f.dx = dx;
    f.dy = dy;
    int row = 0;
    for (std::string_view line : split_lines(text)) {
        if (trim(line).empty()) continue;
        ++row;
        auto cells = split_csv(line);
        if (f.nx == 0) f.nx = static_cast<int>(cells.size());
        if (static_cast<int>(cells.size()) != f.nx)
            throw ParseError("heightfield csv row " + std::to_string(row) + ": expected " +
                             std::to_string(f.nx) + " values, got " + std::to_string(cells.size()));
        for (auto c : cells)
            f.depth.push_back(parse_double(c, "heightfield csv row " + std::to_string(row)));
    }
    f.ny = row;
    f.validate();
    return f;
}

// Binary grid format: 32-byte little-endian header followed by nx*ny
// float64 depths, row-major.
//   offset 0  u32 magic "P2CG"
//   offset 4  u32 nx
//   offset 8  u32 ny
//   offset 12 u32 unit code (1 = micrometre)
//   offset 16 f64 dx
//   offset 24 f64 dy
constexpr std::uint32_t kGridMagic = 0x47433250u; // "P2CG" little-endian
constexpr std::uint32_t kGridUnitMicrometre = 1u;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, size_t off) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(in[off + k]) << (8 * k);
    return v;
}

inline double get_f64(std::span<const std::uint8_t> in, size_t off) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(in[off + k]) << (8 * k);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

} // namespace detail

inline std::vector<std::uint8_t> heightfield_to_binary(const HeightField& f) {
    f.validate();
    std::vector<std::uint8_t> out;
    out.reserve(32 + f.depth.size() * 8);
    detail::put_u32(out, kGridMagic);
    detail::put_u32(out, static_cast<std::uint32_t>(f.nx));
    detail::put_u32(out, static_cast<std::uint32_t>(f.ny));
    detail::put_u32(out, kGridUnitMicrometre);
    detail::put_f64(out, f.dx);
    detail::put_f64(out, f.dy);
    for (double v : f.depth) detail::put_f64(out, v);
    return out;
}

inline HeightField heightfield_from_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 32) throw ParseError("grid file: truncated header");
    if (detail::get_u32(bytes, 0) != kGridMagic)
        throw ParseError("grid file: bad magic (not a pit2crack grid file)");
    HeightField f;
    f.nx = static_cast<int>(detail::get_u32(bytes, 4));
    f.ny = static_cast<int>(detail::get_u32(bytes, 8));
    const std::uint32_t unit = detail::get_u32(bytes, 12);
    if (unit != kGridUnitMicrometre)
        throw ParseError("grid file: unsupported unit code " + std::to_string(unit));
    f.dx = detail::get_f64(bytes, 16);
    f.dy = detail::get_f64(bytes, 24);
    const size_t n = static_cast<size_t>(f.nx) * f.ny;
    if (bytes.size() != 32 + 8 * n)
        throw ParseError("grid file: payload size mismatch (expected " + std::to_string(32 + 8 * n) +
                         " bytes, got " + std::to_string(bytes.size()) + ")");
    f.depth.resize(n);
    for (size_t k = 0; k < n; ++k) f.depth[k] = detail::get_f64(bytes, 32 + 8 * k);
    f.validate();
    return f;
}

} // namespace p2c
