#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "pit2crack/errors.hpp"
#include "pit2crack/heightfield.hpp"
#include "pit2crack/util.hpp"

namespace p2c {

/// Indexed triangle mesh, coordinates in um, z up. Triangles are oriented
/// counter-clockwise seen from outside the material.
struct TriangleMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;
};

constexpr double kDegenerateAreaThreshold = 1e-6; // um^2

inline std::array<double, 3> triangle_normal(const TriangleMesh& m, size_t t) {
    const auto& a = m.vertices[m.triangles[t][0]];
    const auto& b = m.vertices[m.triangles[t][1]];
    const auto& c = m.vertices[m.triangles[t][2]];
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    std::array<double, 3> n{uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx};
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (len > 0.0) {
        n[0] /= len;
        n[1] /= len;
        n[2] /= len;
    }
    return n;
}

inline double triangle_area(const TriangleMesh& m, size_t t) {
    const auto& a = m.vertices[m.triangles[t][0]];
    const auto& b = m.vertices[m.triangles[t][1]];
    const auto& c = m.vertices[m.triangles[t][2]];
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
    return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

inline void validate_mesh(const TriangleMesh& m) {
    const int nv = static_cast<int>(m.vertices.size());
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        for (int k = 0; k < 3; ++k)
            if (m.triangles[t][k] < 0 || m.triangles[t][k] >= nv)
                throw DomainError("mesh: triangle " + std::to_string(t) + " references vertex " +
                                  std::to_string(m.triangles[t][k]) + " out of range");
        if (triangle_area(m, t) <= kDegenerateAreaThreshold)
            throw DomainError("mesh: triangle " + std::to_string(t) + " is degenerate (area " +
                              format_double(triangle_area(m, t)) + " um^2)");
    }
}

enum class MeshMode { surface_only, closed_slab };

/// Triangulates a heightfield. Each grid cell splits along its
/// (i, j) -> (i+1, j+1) diagonal, a fixed rule that keeps the output
/// byte-deterministic. surface_only meshes just the top surface
/// (vertex (i, j) at z = -depth); closed_slab adds four side walls and a
/// bottom at z = -thickness to form a watertight boundary.
inline TriangleMesh field_to_mesh(const HeightField& field, MeshMode mode, double thickness = 0.0) {
    field.validate();
    if (mode == MeshMode::closed_slab && !(thickness > field.max_depth()))
        throw DimensionError("field_to_mesh: slab thickness " + format_double(thickness) +
                             " um must exceed the maximum pit depth " +
                             format_double(field.max_depth()) + " um");
    const int nx = field.nx, ny = field.ny;
    TriangleMesh m;
    const size_t top_count = static_cast<size_t>(nx) * ny;
    m.vertices.reserve(mode == MeshMode::surface_only ? top_count : 2 * top_count);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            m.vertices.push_back({field.x(i), field.y(j), -field.at(i, j)});

    auto top = [nx](int i, int j) { return j * nx + i; };
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            // CCW from above => upward-facing normals on the top surface
            m.triangles.push_back({top(i, j), top(i + 1, j), top(i + 1, j + 1)});
            m.triangles.push_back({top(i, j), top(i + 1, j + 1), top(i, j + 1)});
        }
    if (mode == MeshMode::surface_only) return m;

    const int base = nx * ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            m.vertices.push_back({field.x(i), field.y(j), -thickness});
    auto bot = [nx, base](int i, int j) { return base + j * nx + i; };
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            m.triangles.push_back({bot(i, j), bot(i + 1, j + 1), bot(i + 1, j)});
            m.triangles.push_back({bot(i, j), bot(i, j + 1), bot(i + 1, j + 1)});
        }
    // side walls, outward normals
    for (int i = 0; i + 1 < nx; ++i) {
        m.triangles.push_back({top(i, 0), bot(i, 0), bot(i + 1, 0)});         // y = 0, -y
        m.triangles.push_back({top(i, 0), bot(i + 1, 0), top(i + 1, 0)});
        m.triangles.push_back({top(i, ny - 1), bot(i + 1, ny - 1), bot(i, ny - 1)}); // y = Ly, +y
        m.triangles.push_back({top(i, ny - 1), top(i + 1, ny - 1), bot(i + 1, ny - 1)});
    }
    for (int j = 0; j + 1 < ny; ++j) {
        m.triangles.push_back({top(0, j), bot(0, j + 1), bot(0, j)});         // x = 0, -x
        m.triangles.push_back({top(0, j), top(0, j + 1), bot(0, j + 1)});
        m.triangles.push_back({top(nx - 1, j), bot(nx - 1, j), bot(nx - 1, j + 1)}); // x = Lx, +x
        m.triangles.push_back({top(nx - 1, j), bot(nx - 1, j + 1), top(nx - 1, j + 1)});
    }
    return m;
}

enum class StlFormat { binary, ascii };

namespace detail {

inline void put_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

} // namespace detail

/// Serializes to STL. Binary layout: 80-byte header, little-endian uint32
/// triangle count, then 50 bytes per triangle (float32 normal, three
/// float32 vertices, zero uint16 attribute).
inline std::vector<std::uint8_t> write_stl(const TriangleMesh& mesh, StlFormat format,
                                           const std::string& name = "pit2crack") {
    std::vector<std::uint8_t> out;
    if (format == StlFormat::binary) {
        out.assign(80, 0);
        const std::string header = "pit2crack heightfield mesh";
        std::memcpy(out.data(), header.data(), std::min<size_t>(header.size(), 80));
        const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
        for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(count >> (8 * k)));
        for (size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto n = triangle_normal(mesh, t);
            for (int k = 0; k < 3; ++k) detail::put_f32(out, static_cast<float>(n[k]));
            for (int v = 0; v < 3; ++v)
                for (int k = 0; k < 3; ++k)
                    detail::put_f32(out, static_cast<float>(mesh.vertices[mesh.triangles[t][v]][k]));
            out.push_back(0);
            out.push_back(0);
        }
        return out;
    }
    std::string text = "solid " + name + "\n";
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto n = triangle_normal(mesh, t);
        text += "  facet normal " + format_double(n[0]) + " " + format_double(n[1]) + " " +
                format_double(n[2]) + "\n    outer loop\n";
        for (int v = 0; v < 3; ++v) {
            const auto& p = mesh.vertices[mesh.triangles[t][v]];
            text += "      vertex " + format_double(p[0]) + " " + format_double(p[1]) + " " +
                    format_double(p[2]) + "\n";
        }
        text += "    endloop\n  endfacet\n";
    }
    text += "endsolid " + name + "\n";
    out.assign(text.begin(), text.end());
    return out;
}

} // namespace p2c
