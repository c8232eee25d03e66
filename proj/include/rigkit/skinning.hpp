#pragma once

#include <vector>

#include "rigkit/matrix.hpp"
#include "rigkit/rig.hpp"

namespace rigkit {

// Per-joint local rotations, aligned with the skeleton's joint order.
// Only the root may carry a translation on top of its rest offset.
struct PoseSpec {
    std::vector<Quat> rotations;
    Vec3 root_translation;

    static PoseSpec identity(int joint_count) {
        PoseSpec pose;
        pose.rotations.assign(static_cast<size_t>(joint_count), Quat{});
        return pose;
    }
};

// Rest (bind) and posed world transform for every bone, in the
// skeleton's bone order.
struct BoneTransforms {
    std::vector<RigidTransform> rest;
    std::vector<RigidTransform> posed;

    int bone_count() const { return static_cast<int>(rest.size()); }
};

// Row-softmax point/bone affinities: a[i,b] = <point_i, bone_b> / sqrt(D),
// normalized per row with max subtraction.
SkinningMatrix skinning_from_embeddings(const EmbeddingMatrix& point_embs,
                                        const EmbeddingMatrix& bone_embs);

// Mean over rows of -sum_b ref[b] * log(max(pred[b], 1e-12)).
double soft_cross_entropy(const SkinningMatrix& reference, const SkinningMatrix& predicted);

// Model-free baseline: w[v,b] = softmax_b(-sharpness * dist(v, bone_b)).
SkinningMatrix heuristic_skin(const Mesh& mesh, const Skeleton& skeleton, double sharpness);

// Keeps the max_influences largest weights of each row and renormalizes.
// Opt-in; engines often cap influences at 4.
SkinningMatrix prune_influences(const SkinningMatrix& skinning, int max_influences);

// World transform of a joint = parent world ∘ local, where the local
// transform translates by the rest offset from the parent and then
// rotates by the joint's pose quaternion.  Rest transforms use the
// identity pose, so each bone's bind transform is a pure translation to
// its head joint.
BoneTransforms forward_kinematics(const Skeleton& skeleton, const PoseSpec& pose);

// Linear blend skinning: v' = sum_b w[v,b] * (posed_b ∘ rest_b⁻¹)(v).
Mesh lbs_pose(const Mesh& mesh, const SkinningMatrix& weights, const BoneTransforms& transforms);

}  // namespace rigkit
