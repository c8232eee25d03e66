#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rigkit/rig.hpp"

namespace rigkit {

// Closest point of a triangle to a query point, with barycentric
// coordinates (point = u*a + v*b + w*c, u + v + w = 1).
struct TrianglePoint {
    Vec3 point;
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
};

TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct SurfaceHit {
    int triangle = -1;
    Vec3 point;
    std::array<double, 3> barycentric{};
    double distance2 = 0.0;
};

// Axis-aligned bounding-volume tree over mesh triangles for
// nearest-point-on-surface queries.
class TriangleBvh {
public:
    explicit TriangleBvh(const Mesh& mesh);

    SurfaceHit nearest(const Vec3& p) const;

private:
    struct Node {
        Aabb box;
        int left = -1;   // internal: child node ids
        int right = -1;
        int begin = 0;   // leaf: range into triangle_order_
        int end = 0;
    };

    int build(int begin, int end);
    void search(int node, const Vec3& p, SurfaceHit& best) const;

    std::vector<std::array<Vec3, 3>> corners_;
    std::vector<int> triangle_order_;
    std::vector<Vec3> centroids_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

struct SurfaceSamples {
    std::vector<Vec3> points;
    std::vector<int> triangles;
    std::vector<std::array<double, 3>> barycentric;
};

// Area-weighted uniform samples over the mesh surface.  Deterministic
// for a given seed.  A mesh with no positive-area face is a DataError.
SurfaceSamples sample_surface(const Mesh& mesh, int n_points, uint64_t seed);

}  // namespace rigkit
