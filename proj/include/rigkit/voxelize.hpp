#pragma once

#include <compare>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "rigkit/matrix.hpp"
#include "rigkit/rig.hpp"

namespace rigkit {

struct VoxelCoord {
    int i = 0;
    int j = 0;
    int k = 0;

    auto operator<=>(const VoxelCoord&) const = default;
};

struct OccupancySet {
    int resolution = 64;
    std::set<VoxelCoord> cells;
};

struct GridCell {
    std::vector<double> feature;
    // Number of bones that contributed to this cell.
    int count = 0;
};

struct SparseFeatureGrid {
    int resolution = 64;
    int feature_dim = 0;
    // std::map keeps cells in lexicographic (i, j, k) order, which is the
    // serialization order.
    std::map<VoxelCoord, GridCell> cells;
};

// Cell containing a point: floor(x * resolution) clamped to the grid.
// Cells partition the cube as [i/r, (i+1)/r) with the top slice closed,
// so every point belongs to exactly one cell and the assignment agrees
// with coordinate quantization.
VoxelCoord voxel_of_point(const Vec3& p, int resolution);

// Cells whose region the triangle surface touches (exact test, same
// half-open cell convention as voxel_of_point).  Every vertex's own cell
// is always included.  Vertices outside the unit cube by more than 1e-6
// are a DataError ("unnormalized input").
OccupancySet voxelize_surface(const Mesh& mesh, int resolution = 64);

// Cells swept by the segment from head to tail, by parametric grid
// traversal.  The cells containing the endpoints are always present and
// a degenerate segment yields exactly its endpoint cell.  The result is
// 26-connected.
OccupancySet rasterize_bone(const Vec3& head, const Vec3& tail, int resolution = 64);

// True if the cells form a single 26-connected component (empty and
// singleton sets count as connected).
bool is_26_connected(const OccupancySet& grid);

// Weighted mean feature over the vertices a bone influences:
// sum(w_v * f_v) / (sum(w_v) + epsilon).  All-zero weights give a zero
// vector.  weights.size() must equal features.rows.
std::vector<double> pool_bone_feature(std::span<const double> weights, const Matrix& features,
                                      double epsilon = 1e-8);

// Rasterizes every bone and attaches its feature row to the swept cells.
// Cells shared by several bones store the arithmetic mean of their
// features.
SparseFeatureGrid build_skeleton_grid(const std::vector<std::pair<Vec3, Vec3>>& bones,
                                      const Matrix& bone_features, int resolution = 64);

}  // namespace rigkit
