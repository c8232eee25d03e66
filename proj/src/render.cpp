#include "rigkit/render.hpp"

#include <algorithm>
#include <cstdio>

#include "rigkit/error.hpp"

namespace rigkit {

namespace {

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string render_skeleton_svg(const Skeleton& skeleton, int size) {
    if (skeleton.joints.empty()) throw DataError("render: empty skeleton");
    if (size < 16) throw DataError("render: size too small");
    const int root = skeleton.root();

    Aabb box;
    for (const Joint& j : skeleton.joints) box.expand(j.position);
    const Vec3 extent = box.extent();
    const double span = std::max({extent.x, extent.y, 1e-9});
    const double margin = 0.05 * static_cast<double>(size);
    const double scale = (static_cast<double>(size) - 2.0 * margin) / span;
    const Vec3 center = box.center();

    const auto px = [&](const Vec3& p) {
        return 0.5 * static_cast<double>(size) + (p.x - center.x) * scale;
    };
    const auto py = [&](const Vec3& p) {
        // SVG y grows downward.
        return 0.5 * static_cast<double>(size) - (p.y - center.y) * scale;
    };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) +
                      "\" height=\"" + std::to_string(size) + "\" viewBox=\"0 0 " +
                      std::to_string(size) + " " + std::to_string(size) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const Bone& b : skeleton.bones()) {
        const Vec3 h = skeleton.head_of(b);
        const Vec3 t = skeleton.tail_of(b);
        svg += "  <line x1=\"" + f2(px(h)) + "\" y1=\"" + f2(py(h)) + "\" x2=\"" + f2(px(t)) +
               "\" y2=\"" + f2(py(t)) + "\" stroke=\"#444\" stroke-width=\"2\"/>\n";
    }
    for (size_t j = 0; j < skeleton.joints.size(); ++j) {
        const Vec3& p = skeleton.joints[j].position;
        const bool is_root = static_cast<int>(j) == root;
        svg += "  <circle cx=\"" + f2(px(p)) + "\" cy=\"" + f2(py(p)) + "\" r=\"" +
               (is_root ? "6" : "3.5") + "\" fill=\"" + (is_root ? "#c0392b" : "#2471a3") + "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace rigkit
