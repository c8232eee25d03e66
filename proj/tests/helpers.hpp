#pragma once

// Shared test data generators and brute-force oracles.  The oracles are
// written from the definitions alone so they stay independent of the
// library implementations they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "rigkit/numeric.hpp"
#include "rigkit/rig.hpp"
#include "rigkit/skinning.hpp"
#include "rigkit/voxelize.hpp"

namespace testgen {

using rigkit::Bone;
using rigkit::Joint;
using rigkit::Matrix;
using rigkit::Mesh;
using rigkit::OccupancySet;
using rigkit::RiggedAsset;
using rigkit::Rng;
using rigkit::Skeleton;
using rigkit::SkinningMatrix;
using rigkit::Vec3;
using rigkit::VoxelCoord;

// Random rooted tree with joints in the open unit box, parents always at
// lower indices.
inline Skeleton random_skeleton(Rng& rng, int min_joints = 3, int max_joints = 64) {
    const int n = min_joints +
                  static_cast<int>(rng.next_below(static_cast<uint64_t>(max_joints - min_joints + 1)));
    Skeleton s;
    s.joints.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        Joint& j = s.joints[static_cast<size_t>(i)];
        j.position = {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
        if (i > 0) j.parent = static_cast<int>(rng.next_below(static_cast<uint64_t>(i)));
        j.name = "j" + std::to_string(i);
    }
    return s;
}

inline std::vector<int> random_permutation(Rng& rng, int n) {
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(i + 1)));
        std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(j)]);
    }
    return p;
}

// Rebuilds the skeleton with joint i stored at slot new_of_old[i],
// remapping parent indices.  The tree itself is unchanged.
inline Skeleton permute_joints(const Skeleton& s, const std::vector<int>& new_of_old) {
    Skeleton out;
    out.joints.resize(s.joints.size());
    for (size_t i = 0; i < s.joints.size(); ++i) {
        Joint j = s.joints[i];
        if (j.parent) j.parent = new_of_old[static_cast<size_t>(*j.parent)];
        out.joints[static_cast<size_t>(new_of_old[i])] = std::move(j);
    }
    return out;
}

// Watertight UV sphere; vertex count = (rings - 1) * segments + 2.
inline Mesh uv_sphere(int rings, int segments, const Vec3& center = {0.5, 0.5, 0.5},
                      double radius = 0.35) {
    Mesh mesh;
    const double pi = 3.14159265358979323846;
    mesh.vertices.push_back(center + Vec3{0, 0, radius});
    mesh.vertices.push_back(center - Vec3{0, 0, radius});
    for (int i = 1; i < rings; ++i) {
        const double theta = pi * i / rings;
        for (int j = 0; j < segments; ++j) {
            const double phi = 2.0 * pi * j / segments;
            mesh.vertices.push_back(center + Vec3{radius * std::sin(theta) * std::cos(phi),
                                                  radius * std::sin(theta) * std::sin(phi),
                                                  radius * std::cos(theta)});
        }
    }
    auto ring_vertex = [segments](int ring, int seg) {
        return 2 + (ring - 1) * segments + (seg % segments);
    };
    for (int j = 0; j < segments; ++j) {
        mesh.faces.push_back({0, ring_vertex(1, j), ring_vertex(1, j + 1)});
        mesh.faces.push_back({1, ring_vertex(rings - 1, j + 1), ring_vertex(rings - 1, j)});
    }
    for (int i = 1; i + 1 < rings; ++i) {
        for (int j = 0; j < segments; ++j) {
            const int a = ring_vertex(i, j), b = ring_vertex(i, j + 1);
            const int c = ring_vertex(i + 1, j), d = ring_vertex(i + 1, j + 1);
            mesh.faces.push_back({a, c, d});
            mesh.faces.push_back({a, d, b});
        }
    }
    return mesh;
}

// Mesh + skeleton + pruned heuristic skin, everything inside the unit box.
inline RiggedAsset random_asset(Rng& rng, int min_joints = 4, int max_joints = 16,
                                int rings = 10, int segments = 14) {
    RiggedAsset asset;
    asset.skeleton = random_skeleton(rng, min_joints, max_joints);
    const double radius = rng.uniform(0.2, 0.42);
    asset.mesh = uv_sphere(rings, segments, {0.5, 0.5, 0.5}, radius);
    for (Vec3& v : asset.mesh.vertices) {
        v.x += rng.uniform(-0.02, 0.02);
        v.y += rng.uniform(-0.02, 0.02);
        v.z += rng.uniform(-0.02, 0.02);
    }
    asset.skinning = rigkit::prune_influences(
        rigkit::heuristic_skin(asset.mesh, asset.skeleton, rng.uniform(6.0, 24.0)), 4);
    return asset;
}

// Exact limit of the dense-sampling rasterization oracle: a cell is in
// the set iff some segment point maps to it under voxel_of_point.  Per
// cell the closed slab interval [t0, t1] is intersected; interval ends
// and midpoint are enough witnesses for segments in general position.
inline std::set<VoxelCoord> segment_cells_oracle(const Vec3& a, const Vec3& b, int res) {
    std::set<VoxelCoord> cells;
    cells.insert(rigkit::voxel_of_point(a, res));
    cells.insert(rigkit::voxel_of_point(b, res));
    const Vec3 d = b - a;
    const Vec3 lo_pt{std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
    const Vec3 hi_pt{std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
    const VoxelCoord lo = rigkit::voxel_of_point(lo_pt, res);
    const VoxelCoord hi = rigkit::voxel_of_point(hi_pt, res);
    const double h = 1.0 / res;
    for (int i = lo.i; i <= hi.i; ++i) {
        for (int j = lo.j; j <= hi.j; ++j) {
            for (int k = lo.k; k <= hi.k; ++k) {
                const std::array<int, 3> c{i, j, k};
                double t0 = 0.0, t1 = 1.0;
                bool feasible = true;
                for (int axis = 0; axis < 3 && feasible; ++axis) {
                    const double clo = c[static_cast<size_t>(axis)] * h;
                    const double chi = clo + h;
                    if (d[axis] == 0.0) {
                        feasible = a[axis] >= clo && a[axis] <= chi;
                        continue;
                    }
                    double ta = (clo - a[axis]) / d[axis];
                    double tb = (chi - a[axis]) / d[axis];
                    if (ta > tb) std::swap(ta, tb);
                    t0 = std::max(t0, ta);
                    t1 = std::min(t1, tb);
                    feasible = t0 <= t1;
                }
                if (!feasible) continue;
                const VoxelCoord cell{i, j, k};
                for (const double t : {t0, 0.5 * (t0 + t1), t1}) {
                    if (rigkit::voxel_of_point(a + d * t, res) == cell) {
                        cells.insert(cell);
                        break;
                    }
                }
            }
        }
    }
    return cells;
}

// Finite uniform sampling of the segment; always a subset of the true
// cell set, so it can only certify presence.
inline std::set<VoxelCoord> segment_cells_sampled(const Vec3& a, const Vec3& b, int res,
                                                  int per_cell = 32) {
    std::set<VoxelCoord> cells;
    const double len = (b - a).norm();
    const int steps = std::max(2, static_cast<int>(std::ceil(len * res * per_cell)));
    for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        cells.insert(rigkit::voxel_of_point(a + (b - a) * t, res));
    }
    return cells;
}

// Scratch directory under the system temp root, unique per tag.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("rigkit-" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testgen
