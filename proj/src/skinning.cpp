#include "rigkit/skinning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rigkit/error.hpp"
#include "rigkit/metrics.hpp"
#include "rigkit/numeric.hpp"

namespace rigkit {

namespace {

void softmax_in_place(std::span<double> logits) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logits) m = std::max(m, v);
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : logits) v /= sum;
}

}  // namespace

SkinningMatrix skinning_from_embeddings(const EmbeddingMatrix& point_embs,
                                        const EmbeddingMatrix& bone_embs) {
    if (bone_embs.rows == 0) throw DataError("skinning_from_embeddings: no bones");
    if (point_embs.cols != bone_embs.cols || point_embs.cols <= 0)
        throw DataError("skinning_from_embeddings: embedding dimensions differ");
    for (double v : point_embs.data)
        if (!std::isfinite(v)) throw DataError("skinning_from_embeddings: non-finite point embedding");
    for (double v : bone_embs.data)
        if (!std::isfinite(v)) throw DataError("skinning_from_embeddings: non-finite bone embedding");

    const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(point_embs.cols));
    SkinningMatrix out(point_embs.rows, bone_embs.rows);
    for (int i = 0; i < point_embs.rows; ++i) {
        auto row = out.weights.row(i);
        for (int b = 0; b < bone_embs.rows; ++b) {
            double s = 0.0;
            for (int d = 0; d < point_embs.cols; ++d) s += point_embs.at(i, d) * bone_embs.at(b, d);
            row[static_cast<size_t>(b)] = s * inv_sqrt_dim;
        }
        softmax_in_place(row);
    }
    return out;
}

double soft_cross_entropy(const SkinningMatrix& reference, const SkinningMatrix& predicted) {
    if (!reference.weights.same_shape(predicted.weights))
        throw DataError("soft_cross_entropy: shape mismatch");
    const int rows = reference.weights.rows;
    if (rows == 0) return 0.0;
    std::vector<double> row_losses(static_cast<size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
        double loss = 0.0;
        for (int c = 0; c < reference.weights.cols; ++c) {
            double p = std::max(predicted.weights.at(r, c), 1e-12);
            loss -= reference.weights.at(r, c) * std::log(p);
        }
        row_losses[static_cast<size_t>(r)] = loss;
    }
    return pairwise_mean(row_losses);
}

SkinningMatrix heuristic_skin(const Mesh& mesh, const Skeleton& skeleton, double sharpness) {
    if (sharpness <= 0.0) throw DataError("heuristic_skin: sharpness must be positive");
    std::vector<Bone> bones = skeleton.bones();
    if (bones.empty()) throw DataError("heuristic_skin: skeleton has no bones");

    SkinningMatrix out(static_cast<int>(mesh.vertices.size()), static_cast<int>(bones.size()));
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        auto row = out.weights.row(static_cast<int>(v));
        for (size_t b = 0; b < bones.size(); ++b) {
            double d = point_segment_distance(mesh.vertices[v], skeleton.head_of(bones[b]),
                                              skeleton.tail_of(bones[b]));
            row[b] = -sharpness * d;
        }
        softmax_in_place(row);
    }
    return out;
}

SkinningMatrix prune_influences(const SkinningMatrix& skinning, int max_influences) {
    if (max_influences < 1) throw DataError("prune_influences: need at least one influence");
    const Matrix& w = skinning.weights;
    if (w.cols <= max_influences) return skinning;

    SkinningMatrix out(w.rows, w.cols);
    std::vector<int> order(static_cast<size_t>(w.cols));
    for (int r = 0; r < w.rows; ++r) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return w.at(r, a) > w.at(r, b); });
        double sum = 0.0;
        for (int i = 0; i < max_influences; ++i) sum += w.at(r, order[static_cast<size_t>(i)]);
        if (sum <= 0.0) {
            for (int i = 0; i < max_influences; ++i)
                out.weights.at(r, order[static_cast<size_t>(i)]) = 1.0 / max_influences;
        } else {
            for (int i = 0; i < max_influences; ++i) {
                int c = order[static_cast<size_t>(i)];
                out.weights.at(r, c) = w.at(r, c) / sum;
            }
        }
    }
    return out;
}

BoneTransforms forward_kinematics(const Skeleton& skeleton, const PoseSpec& pose) {
    const int n = skeleton.joint_count();
    if (static_cast<int>(pose.rotations.size()) != n)
        throw DataError("forward_kinematics: pose joint count differs from skeleton");
    for (const Quat& q : pose.rotations)
        if (std::abs(q.norm() - 1.0) > 1e-6)
            throw DataError("forward_kinematics: pose quaternion is not unit length");

    const int root = skeleton.root();
    std::vector<int> depth = joint_depths(skeleton);
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return depth[static_cast<size_t>(a)] < depth[static_cast<size_t>(b)];
    });

    auto local_offset = [&](int j) {
        const Joint& joint = skeleton.joints[static_cast<size_t>(j)];
        if (!joint.parent) return joint.position;
        return joint.position - skeleton.joints[static_cast<size_t>(*joint.parent)].position;
    };

    std::vector<RigidTransform> rest_world(static_cast<size_t>(n));
    std::vector<RigidTransform> posed_world(static_cast<size_t>(n));
    for (int j : order) {
        RigidTransform local_rest{Mat3::identity(), local_offset(j)};
        RigidTransform local_posed{pose.rotations[static_cast<size_t>(j)].to_matrix(),
                                   local_offset(j)};
        if (j == root) local_posed.translation += pose.root_translation;
        const auto& parent = skeleton.joints[static_cast<size_t>(j)].parent;
        if (!parent) {
            rest_world[static_cast<size_t>(j)] = local_rest;
            posed_world[static_cast<size_t>(j)] = local_posed;
        } else {
            rest_world[static_cast<size_t>(j)] =
                rest_world[static_cast<size_t>(*parent)].compose(local_rest);
            posed_world[static_cast<size_t>(j)] =
                posed_world[static_cast<size_t>(*parent)].compose(local_posed);
        }
    }

    BoneTransforms out;
    for (const Bone& b : skeleton.bones()) {
        out.rest.push_back(rest_world[static_cast<size_t>(b.head_joint)]);
        out.posed.push_back(posed_world[static_cast<size_t>(b.head_joint)]);
    }
    return out;
}

Mesh lbs_pose(const Mesh& mesh, const SkinningMatrix& weights, const BoneTransforms& transforms) {
    const Matrix& w = weights.weights;
    if (w.rows != static_cast<int>(mesh.vertices.size()))
        throw DataError("lbs_pose: weight rows differ from vertex count");
    if (w.cols != transforms.bone_count())
        throw DataError("lbs_pose: weight columns differ from bone count");
    if (transforms.posed.size() != transforms.rest.size())
        throw DataError("lbs_pose: rest/posed transform counts differ");

    // Precompose each bone's deformation once.
    std::vector<RigidTransform> deform(static_cast<size_t>(w.cols));
    for (int b = 0; b < w.cols; ++b)
        deform[static_cast<size_t>(b)] =
            transforms.posed[static_cast<size_t>(b)].compose(transforms.rest[static_cast<size_t>(b)].inverse());

    Mesh out = mesh;
    for (int v = 0; v < w.rows; ++v) {
        Vec3 acc;
        for (int b = 0; b < w.cols; ++b) {
            double wb = w.at(v, b);
            if (wb != 0.0) acc += deform[static_cast<size_t>(b)].apply(mesh.vertices[static_cast<size_t>(v)]) * wb;
        }
        out.vertices[static_cast<size_t>(v)] = acc;
    }
    return out;
}

}  // namespace rigkit
