#include "rigkit/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rigkit/error.hpp"
#include "rigkit/numeric.hpp"

namespace rigkit {

TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Voronoi-region walk over the triangle's features.
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = dot(ab, ap);
    const double d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return {a, 1.0, 0.0, 0.0};

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp);
    const double d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return {b, 0.0, 1.0, 0.0};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double denom = d1 - d3;
        const double t = denom > 0.0 ? d1 / denom : 0.0;
        return {a + ab * t, 1.0 - t, t, 0.0};
    }

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp);
    const double d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return {c, 0.0, 0.0, 1.0};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double denom = d2 - d6;
        const double t = denom > 0.0 ? d2 / denom : 0.0;
        return {a + ac * t, 1.0 - t, 0.0, t};
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0) {
        const double denom = (d4 - d3) + (d5 - d6);
        const double t = denom > 0.0 ? (d4 - d3) / denom : 0.0;
        return {b + (c - b) * t, 0.0, 1.0 - t, t};
    }

    const double sum = va + vb + vc;
    if (sum > 0.0) {
        const double v = vb / sum;
        const double w = vc / sum;
        return {a + ab * v + ac * w, 1.0 - v - w, v, w};
    }

    // Degenerate (zero-area) triangle: fall back to the closest edge.
    TrianglePoint best{a, 1.0, 0.0, 0.0};
    double best_d2 = (p - a).norm2();
    auto consider_edge = [&](const Vec3& e0, const Vec3& e1, int i0, int i1) {
        const Vec3 d = e1 - e0;
        const double len2 = d.norm2();
        const double t = len2 > 0.0 ? std::clamp(dot(p - e0, d) / len2, 0.0, 1.0) : 0.0;
        const Vec3 q = e0 + d * t;
        const double d2 = (p - q).norm2();
        if (d2 < best_d2) {
            best_d2 = d2;
            best.point = q;
            double bary[3] = {0.0, 0.0, 0.0};
            bary[i0] = 1.0 - t;
            bary[i1] = t;
            best.u = bary[0];
            best.v = bary[1];
            best.w = bary[2];
        }
    };
    consider_edge(a, b, 0, 1);
    consider_edge(b, c, 1, 2);
    consider_edge(a, c, 0, 2);
    return best;
}

TriangleBvh::TriangleBvh(const Mesh& mesh) {
    if (mesh.faces.empty()) throw DataError("surface query on mesh with no faces");
    corners_.reserve(mesh.faces.size());
    centroids_.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices.at(static_cast<size_t>(f[0]));
        const Vec3& b = mesh.vertices.at(static_cast<size_t>(f[1]));
        const Vec3& c = mesh.vertices.at(static_cast<size_t>(f[2]));
        corners_.push_back({a, b, c});
        centroids_.push_back((a + b + c) * (1.0 / 3.0));
    }
    triangle_order_.resize(corners_.size());
    std::iota(triangle_order_.begin(), triangle_order_.end(), 0);
    nodes_.reserve(2 * corners_.size());
    root_ = build(0, static_cast<int>(triangle_order_.size()));
}

int TriangleBvh::build(int begin, int end) {
    Node node;
    node.begin = begin;
    node.end = end;
    for (int t = begin; t < end; ++t) {
        const auto& tri = corners_[static_cast<size_t>(triangle_order_[static_cast<size_t>(t)])];
        node.box.expand(tri[0]);
        node.box.expand(tri[1]);
        node.box.expand(tri[2]);
    }
    constexpr int kLeafSize = 4;
    if (end - begin > kLeafSize) {
        const Vec3 ext = node.box.extent();
        int axis = 0;
        if (ext.y > ext.x) axis = 1;
        if (ext.z > ext[axis]) axis = 2;
        const int mid = begin + (end - begin) / 2;
        std::nth_element(triangle_order_.begin() + begin, triangle_order_.begin() + mid,
                         triangle_order_.begin() + end, [&](int lhs, int rhs) {
                             return centroids_[static_cast<size_t>(lhs)][axis] <
                                    centroids_[static_cast<size_t>(rhs)][axis];
                         });
        node.left = build(begin, mid);
        node.right = build(mid, end);
    }
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
}

SurfaceHit TriangleBvh::nearest(const Vec3& p) const {
    SurfaceHit best;
    best.distance2 = std::numeric_limits<double>::infinity();
    search(root_, p, best);
    return best;
}

void TriangleBvh::search(int node_id, const Vec3& p, SurfaceHit& best) const {
    const Node& node = nodes_[static_cast<size_t>(node_id)];
    if (node.box.distance2(p) >= best.distance2) return;
    if (node.left < 0) {
        for (int t = node.begin; t < node.end; ++t) {
            const int tri = triangle_order_[static_cast<size_t>(t)];
            const auto& c = corners_[static_cast<size_t>(tri)];
            const TrianglePoint cp = closest_point_on_triangle(p, c[0], c[1], c[2]);
            const double d2 = (p - cp.point).norm2();
            if (d2 < best.distance2) {
                best.distance2 = d2;
                best.triangle = tri;
                best.point = cp.point;
                best.barycentric = {cp.u, cp.v, cp.w};
            }
        }
        return;
    }
    const double dl = nodes_[static_cast<size_t>(node.left)].box.distance2(p);
    const double dr = nodes_[static_cast<size_t>(node.right)].box.distance2(p);
    const int first = dl <= dr ? node.left : node.right;
    const int second = dl <= dr ? node.right : node.left;
    search(first, p, best);
    search(second, p, best);
}

SurfaceSamples sample_surface(const Mesh& mesh, int n_points, uint64_t seed) {
    if (n_points < 0) throw DataError("sample_surface: negative sample count");
    if (mesh.faces.empty()) throw DataError("sample_surface: mesh has no faces");

    std::vector<double> cumulative(mesh.faces.size());
    double total = 0.0;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const Vec3& a = mesh.vertices.at(static_cast<size_t>(mesh.faces[f][0]));
        const Vec3& b = mesh.vertices.at(static_cast<size_t>(mesh.faces[f][1]));
        const Vec3& c = mesh.vertices.at(static_cast<size_t>(mesh.faces[f][2]));
        total += 0.5 * cross(b - a, c - a).norm();
        cumulative[f] = total;
    }
    if (!(total > 0.0)) throw DataError("sample_surface: mesh has no area");

    SurfaceSamples out;
    out.points.reserve(static_cast<size_t>(n_points));
    out.triangles.reserve(static_cast<size_t>(n_points));
    out.barycentric.reserve(static_cast<size_t>(n_points));
    Rng rng(seed);
    for (int s = 0; s < n_points; ++s) {
        const double target = rng.next_double() * total;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
        const size_t f = std::min(static_cast<size_t>(it - cumulative.begin()), mesh.faces.size() - 1);
        double u = rng.next_double();
        double v = rng.next_double();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const double w = 1.0 - u - v;
        const Vec3& a = mesh.vertices[static_cast<size_t>(mesh.faces[f][0])];
        const Vec3& b = mesh.vertices[static_cast<size_t>(mesh.faces[f][1])];
        const Vec3& c = mesh.vertices[static_cast<size_t>(mesh.faces[f][2])];
        out.points.push_back(a * w + b * u + c * v);
        out.triangles.push_back(static_cast<int>(f));
        out.barycentric.push_back({w, u, v});
    }
    return out;
}

}  // namespace rigkit
