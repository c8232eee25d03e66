#include "rigkit/voxelize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rigkit/error.hpp"

namespace rigkit {

namespace {

constexpr double kRangeTolerance = 1e-6;

int cell_index(double x, int resolution) {
    int i = static_cast<int>(std::floor(x * resolution));
    return std::clamp(i, 0, resolution - 1);
}

void check_in_unit_cube(const Vec3& p, const char* what) {
    if (!p.finite()) throw DataError(std::string(what) + ": non-finite coordinate");
    for (int a = 0; a < 3; ++a) {
        if (p[a] < -kRangeTolerance || p[a] > 1.0 + kRangeTolerance)
            throw DataError(std::string(what) + ": unnormalized input, coordinate outside [0, 1]");
    }
}

Vec3 clamp_unit(const Vec3& p) {
    return {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0), std::clamp(p.z, 0.0, 1.0)};
}

// Tiny fixed-capacity polygon for Sutherland-Hodgman clipping.  A
// triangle clipped by six planes has at most nine vertices.
struct ClipPoly {
    std::array<Vec3, 16> pts;
    int n = 0;

    void push(const Vec3& p) { pts[static_cast<size_t>(n++)] = p; }
};

// Clips the polygon against the half-space (keep side depends on
// `keep_below`): coordinate axis `axis` <= bound, or >= bound.
void clip_axis(ClipPoly& poly, int axis, double bound, bool keep_below) {
    ClipPoly out;
    auto inside = [&](const Vec3& p) {
        return keep_below ? p[axis] <= bound : p[axis] >= bound;
    };
    for (int i = 0; i < poly.n; ++i) {
        const Vec3& a = poly.pts[static_cast<size_t>(i)];
        const Vec3& b = poly.pts[static_cast<size_t>((i + 1) % poly.n)];
        bool ia = inside(a), ib = inside(b);
        if (ia) out.push(a);
        if (ia != ib) {
            // Intersection with the plane; the a + t*(b - a) form keeps
            // coordinates exact when the edge lies in the plane.
            double t = (bound - a[axis]) / (b[axis] - a[axis]);
            out.push(a + (b - a) * t);
        }
    }
    poly = out;
}

// Exact test: does the triangle touch the half-open cell region?  The
// triangle is clipped to the closed cell box; a non-empty remainder that
// is not confined to an excluded (upper, non-boundary) face counts.
bool triangle_touches_cell(const Vec3& a, const Vec3& b, const Vec3& c, const VoxelCoord& cell,
                           int resolution) {
    const double h = 1.0 / resolution;
    const Vec3 lo{cell.i * h, cell.j * h, cell.k * h};
    const Vec3 hi{(cell.i + 1) * h, (cell.j + 1) * h, (cell.k + 1) * h};

    ClipPoly poly;
    poly.push(a);
    poly.push(b);
    poly.push(c);
    for (int axis = 0; axis < 3 && poly.n > 0; ++axis) {
        clip_axis(poly, axis, lo[axis], /*keep_below=*/false);
        if (poly.n == 0) return false;
        clip_axis(poly, axis, hi[axis], /*keep_below=*/true);
    }
    if (poly.n == 0) return false;

    // A convex remainder confined to a single upper face belongs to the
    // neighboring cell under the half-open convention.  (Confinement to a
    // union of several faces implies confinement to one of them.)
    const std::array<int, 3> idx{cell.i, cell.j, cell.k};
    for (int axis = 0; axis < 3; ++axis) {
        if (idx[static_cast<size_t>(axis)] == resolution - 1) continue;  // top slice is closed
        bool all_on_face = true;
        for (int i = 0; i < poly.n && all_on_face; ++i)
            all_on_face = poly.pts[static_cast<size_t>(i)][axis] == hi[axis];
        if (all_on_face) return false;
    }
    return true;
}

}  // namespace

VoxelCoord voxel_of_point(const Vec3& p, int resolution) {
    if (resolution <= 0) throw DataError("voxel grid: resolution must be positive");
    if (!p.finite()) throw DataError("voxel grid: non-finite coordinate");
    return {cell_index(p.x, resolution), cell_index(p.y, resolution), cell_index(p.z, resolution)};
}

OccupancySet voxelize_surface(const Mesh& mesh, int resolution) {
    if (resolution <= 0) throw DataError("voxelize_surface: resolution must be positive");
    OccupancySet out;
    out.resolution = resolution;
    for (const Vec3& v : mesh.vertices) check_in_unit_cube(v, "voxelize_surface");

    const int nv = static_cast<int>(mesh.vertices.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        for (int idx : face) {
            if (idx < 0 || idx >= nv)
                throw DataError("voxelize_surface: face " + std::to_string(f) +
                                " references a missing vertex");
        }
        const Vec3 a = clamp_unit(mesh.vertices[static_cast<size_t>(face[0])]);
        const Vec3 b = clamp_unit(mesh.vertices[static_cast<size_t>(face[1])]);
        const Vec3 c = clamp_unit(mesh.vertices[static_cast<size_t>(face[2])]);

        VoxelCoord lo{resolution - 1, resolution - 1, resolution - 1};
        VoxelCoord hi{0, 0, 0};
        for (const Vec3& p : {a, b, c}) {
            VoxelCoord v = voxel_of_point(p, resolution);
            lo = {std::min(lo.i, v.i), std::min(lo.j, v.j), std::min(lo.k, v.k)};
            hi = {std::max(hi.i, v.i), std::max(hi.j, v.j), std::max(hi.k, v.k)};
            out.cells.insert(v);  // vertices always contribute their own cell
        }
        for (int i = lo.i; i <= hi.i; ++i)
            for (int j = lo.j; j <= hi.j; ++j)
                for (int k = lo.k; k <= hi.k; ++k) {
                    VoxelCoord cell{i, j, k};
                    if (out.cells.contains(cell)) continue;
                    if (triangle_touches_cell(a, b, c, cell, resolution)) out.cells.insert(cell);
                }
    }
    return out;
}

OccupancySet rasterize_bone(const Vec3& head, const Vec3& tail, int resolution) {
    if (resolution <= 0) throw DataError("rasterize_bone: resolution must be positive");
    check_in_unit_cube(head, "rasterize_bone");
    check_in_unit_cube(tail, "rasterize_bone");

    const Vec3 p0 = clamp_unit(head);
    const Vec3 p1 = clamp_unit(tail);
    OccupancySet out;
    out.resolution = resolution;

    const VoxelCoord v0 = voxel_of_point(p0, resolution);
    const VoxelCoord v1 = voxel_of_point(p1, resolution);
    out.cells.insert(v0);
    out.cells.insert(v1);

    const Vec3 d = p1 - p0;
    if (d == Vec3{}) return out;

    const double h = 1.0 / resolution;
    const double inf = std::numeric_limits<double>::infinity();
    std::array<int, 3> cur{v0.i, v0.j, v0.k};
    std::array<int, 3> step{};
    std::array<double, 3> t_next{inf, inf, inf};
    std::array<double, 3> t_delta{inf, inf, inf};

    for (int a = 0; a < 3; ++a) {
        double da = d[a];
        if (da > 0.0) {
            step[static_cast<size_t>(a)] = 1;
            t_next[static_cast<size_t>(a)] = ((cur[static_cast<size_t>(a)] + 1) * h - p0[a]) / da;
            t_delta[static_cast<size_t>(a)] = h / da;
        } else if (da < 0.0) {
            step[static_cast<size_t>(a)] = -1;
            t_next[static_cast<size_t>(a)] = (cur[static_cast<size_t>(a)] * h - p0[a]) / da;
            t_delta[static_cast<size_t>(a)] = -h / da;
        }
    }

    while (true) {
        double t_min = std::min({t_next[0], t_next[1], t_next[2]});
        if (!(t_min <= 1.0)) break;
        // Step every axis whose boundary is crossed at exactly t_min, so a
        // pass through a cell edge or corner moves diagonally instead of
        // visiting cells the segment never enters.
        for (int a = 0; a < 3; ++a) {
            if (t_next[static_cast<size_t>(a)] == t_min) {
                cur[static_cast<size_t>(a)] += step[static_cast<size_t>(a)];
                t_next[static_cast<size_t>(a)] += t_delta[static_cast<size_t>(a)];
            }
        }
        if (cur[0] < 0 || cur[0] >= resolution || cur[1] < 0 || cur[1] >= resolution ||
            cur[2] < 0 || cur[2] >= resolution)
            break;  // crossed the outer wall exactly at the segment end
        out.cells.insert({cur[0], cur[1], cur[2]});
    }
    return out;
}

bool is_26_connected(const OccupancySet& grid) {
    if (grid.cells.size() <= 1) return true;
    std::set<VoxelCoord> seen;
    std::vector<VoxelCoord> stack{*grid.cells.begin()};
    seen.insert(stack.back());
    while (!stack.empty()) {
        VoxelCoord v = stack.back();
        stack.pop_back();
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                for (int dk = -1; dk <= 1; ++dk) {
                    if (di == 0 && dj == 0 && dk == 0) continue;
                    VoxelCoord n{v.i + di, v.j + dj, v.k + dk};
                    if (grid.cells.contains(n) && seen.insert(n).second) stack.push_back(n);
                }
    }
    return seen.size() == grid.cells.size();
}

std::vector<double> pool_bone_feature(std::span<const double> weights, const Matrix& features,
                                      double epsilon) {
    if (static_cast<int>(weights.size()) != features.rows)
        throw DataError("pool_bone_feature: weight count differs from feature rows");
    std::vector<double> pooled(static_cast<size_t>(features.cols), 0.0);
    double total = 0.0;
    for (int v = 0; v < features.rows; ++v) {
        double w = weights[static_cast<size_t>(v)];
        total += w;
        for (int c = 0; c < features.cols; ++c)
            pooled[static_cast<size_t>(c)] += w * features.at(v, c);
    }
    double inv = 1.0 / (total + epsilon);
    for (double& x : pooled) x *= inv;
    return pooled;
}

SparseFeatureGrid build_skeleton_grid(const std::vector<std::pair<Vec3, Vec3>>& bones,
                                      const Matrix& bone_features, int resolution) {
    if (bone_features.rows != static_cast<int>(bones.size()))
        throw DataError("build_skeleton_grid: feature rows differ from bone count");
    SparseFeatureGrid grid;
    grid.resolution = resolution;
    grid.feature_dim = bone_features.cols;

    for (size_t b = 0; b < bones.size(); ++b) {
        OccupancySet swept = rasterize_bone(bones[b].first, bones[b].second, resolution);
        for (const VoxelCoord& v : swept.cells) {
            GridCell& cell = grid.cells[v];
            if (cell.count == 0) cell.feature.assign(static_cast<size_t>(bone_features.cols), 0.0);
            for (int c = 0; c < bone_features.cols; ++c)
                cell.feature[static_cast<size_t>(c)] += bone_features.at(static_cast<int>(b), c);
            cell.count += 1;
        }
    }
    for (auto& [coord, cell] : grid.cells) {
        if (cell.count > 1) {
            double inv = 1.0 / cell.count;
            for (double& x : cell.feature) x *= inv;
        }
    }
    return grid;
}

}  // namespace rigkit
