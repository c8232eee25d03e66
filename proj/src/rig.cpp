#include "rigkit/rig.hpp"

#include <algorithm>
#include <cmath>

#include "rigkit/error.hpp"

namespace rigkit {

namespace {

// Returns the root index if the parent links form a single rooted tree,
// otherwise reports every violation it can name.
int check_tree(const Skeleton& skeleton, ValidationReport* report) {
    const int n = skeleton.joint_count();
    int root = -1;
    bool ok = true;
    if (n == 0) {
        if (report) report->push_back({"empty-skeleton", -1, "skeleton has no joints"});
        return -1;
    }
    for (int i = 0; i < n; ++i) {
        const Joint& j = skeleton.joints[static_cast<size_t>(i)];
        if (!j.position.finite()) {
            ok = false;
            if (report) report->push_back({"non-finite-joint", i, "joint position is not finite"});
        }
        if (!j.parent) {
            if (root >= 0) {
                ok = false;
                if (report) report->push_back({"multiple-roots", i, "more than one parentless joint"});
            } else {
                root = i;
            }
        } else if (*j.parent < 0 || *j.parent >= n) {
            ok = false;
            if (report) report->push_back({"parent-range", i, "parent index out of range"});
        } else if (*j.parent == i) {
            ok = false;
            if (report) report->push_back({"self-parent", i, "joint is its own parent"});
        }
    }
    if (root < 0) {
        if (report) report->push_back({"no-root", -1, "every joint has a parent"});
        return -1;
    }
    if (!ok) return -1;

    // Walk each joint up to the root; a walk longer than n means a cycle.
    for (int i = 0; i < n; ++i) {
        int cur = i;
        int steps = 0;
        while (skeleton.joints[static_cast<size_t>(cur)].parent) {
            cur = *skeleton.joints[static_cast<size_t>(cur)].parent;
            if (++steps > n) {
                if (report) report->push_back({"parent-cycle", i, "parent links contain a cycle"});
                return -1;
            }
        }
        if (cur != root) {
            if (report) report->push_back({"disconnected", i, "joint does not reach the root"});
            return -1;
        }
    }
    return root;
}

}  // namespace

int Skeleton::root() const {
    int r = check_tree(*this, nullptr);
    if (r < 0) throw DataError("skeleton is not a single rooted tree");
    return r;
}

std::vector<Bone> Skeleton::bones() const {
    root();  // validates
    std::vector<Bone> out;
    for (int i = 0; i < joint_count(); ++i) {
        const auto& parent = joints[static_cast<size_t>(i)].parent;
        if (parent) out.push_back({*parent, i});
    }
    return out;
}

std::vector<int> joint_depths(const Skeleton& skeleton) {
    skeleton.root();  // validates
    const int n = skeleton.joint_count();
    std::vector<int> depth(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        // Follow parents until a known depth; path length bounded by n.
        std::vector<int> path;
        int cur = i;
        while (depth[static_cast<size_t>(cur)] < 0) {
            path.push_back(cur);
            const auto& p = skeleton.joints[static_cast<size_t>(cur)].parent;
            if (!p) {
                depth[static_cast<size_t>(cur)] = 0;
                path.pop_back();
                break;
            }
            cur = *p;
        }
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            int parent = *skeleton.joints[static_cast<size_t>(*it)].parent;
            depth[static_cast<size_t>(*it)] = depth[static_cast<size_t>(parent)] + 1;
        }
    }
    return depth;
}

ValidationReport validate_mesh(const Mesh& mesh) {
    ValidationReport report;
    const int nv = static_cast<int>(mesh.vertices.size());
    for (int i = 0; i < nv; ++i) {
        if (!mesh.vertices[static_cast<size_t>(i)].finite())
            report.push_back({"non-finite-vertex", i, "vertex coordinate is not finite"});
    }
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        bool in_range = true;
        for (int idx : face) {
            if (idx < 0 || idx >= nv) {
                report.push_back({"face-index", static_cast<long>(f), "face references a missing vertex"});
                in_range = false;
                break;
            }
        }
        if (in_range && (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]))
            report.push_back({"degenerate-face", static_cast<long>(f), "face repeats a vertex index"});
    }
    if (!mesh.normals.empty()) {
        if (mesh.normals.size() != mesh.vertices.size()) {
            report.push_back({"normal-count", -1, "normal list length differs from vertex count"});
        } else {
            for (size_t i = 0; i < mesh.normals.size(); ++i) {
                if (std::abs(mesh.normals[i].norm() - 1.0) > 1e-6)
                    report.push_back({"normal-norm", static_cast<long>(i), "normal is not unit length"});
            }
        }
    }
    return report;
}

ValidationReport validate_skeleton(const Skeleton& skeleton) {
    ValidationReport report;
    check_tree(skeleton, &report);
    return report;
}

ValidationReport validate_asset(const RiggedAsset& asset) {
    ValidationReport report = validate_mesh(asset.mesh);
    ValidationReport skel = validate_skeleton(asset.skeleton);
    report.insert(report.end(), skel.begin(), skel.end());

    const Matrix& w = asset.skinning.weights;
    if (w.rows != static_cast<int>(asset.mesh.vertices.size()))
        report.push_back({"skin-rows", -1, "skinning rows differ from vertex count"});
    if (skel.empty()) {
        int bones = static_cast<int>(asset.skeleton.bones().size());
        if (w.cols != bones)
            report.push_back({"skin-cols", -1, "skinning columns differ from bone count"});
    }
    for (int r = 0; r < w.rows; ++r) {
        double sum = 0.0;
        bool negative = false;
        for (int c = 0; c < w.cols; ++c) {
            double v = w.at(r, c);
            if (!std::isfinite(v)) {
                report.push_back({"non-finite-weight", r, "skinning weight is not finite"});
                negative = true;  // suppress the row-sum check as well
                break;
            }
            if (v < 0.0) negative = true;
            sum += v;
        }
        if (negative) {
            report.push_back({"negative-weight", r, "skinning row has a negative weight"});
            continue;
        }
        if (w.cols > 0 && std::abs(sum - 1.0) > 1e-6)
            report.push_back({"row-sum", r, "skinning row does not sum to 1"});
    }
    return report;
}

std::pair<RiggedAsset, NormalizationRecord> normalize_unit_box(const RiggedAsset& asset) {
    Aabb box;
    for (const Vec3& v : asset.mesh.vertices) box.expand(v);
    for (const Joint& j : asset.skeleton.joints) box.expand(j.position);
    if (box.empty()) throw DataError("normalize: asset has no points");

    Vec3 ext = box.extent();
    double longest = std::max({ext.x, ext.y, ext.z});
    if (longest <= 0.0) throw DataError("normalize: zero extent");

    NormalizationRecord record;
    record.scale = 1.0 / longest;
    record.translation = Vec3{0.5, 0.5, 0.5} - box.center() * record.scale;

    RiggedAsset out = asset;
    for (Vec3& v : out.mesh.vertices) v = record.apply(v);
    for (Joint& j : out.skeleton.joints) j.position = record.apply(j.position);
    return {std::move(out), record};
}

SkinningMatrix renormalize_skinning(const SkinningMatrix& skinning, double epsilon) {
    const Matrix& w = skinning.weights;
    SkinningMatrix out(w.rows, w.cols);
    for (int r = 0; r < w.rows; ++r) {
        double sum = 0.0;
        for (int c = 0; c < w.cols; ++c) {
            double v = w.at(r, c);
            if (!std::isfinite(v)) throw DataError("renormalize: non-finite weight");
            if (v < 0.0) throw DataError("renormalize: negative weight");
            sum += v;
        }
        if (sum == 0.0) {
            if (w.cols == 0) continue;
            double uniform = 1.0 / w.cols;
            for (int c = 0; c < w.cols; ++c) out.weights.at(r, c) = uniform;
        } else {
            double inv = 1.0 / (sum + epsilon);
            for (int c = 0; c < w.cols; ++c) out.weights.at(r, c) = w.at(r, c) * inv;
        }
    }
    return out;
}

}  // namespace rigkit
