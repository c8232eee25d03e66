#pragma once

#include <cstdint>
#include <vector>

#include "rigkit/rig.hpp"
#include "rigkit/transport.hpp"

namespace rigkit {

struct Segment {
    Vec3 a;
    Vec3 b;
};

// Exact Euclidean distance from p to the segment [a, b]; a degenerate
// segment (a = b) reduces to point distance.
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

// Joint positions in index order.
std::vector<Vec3> joint_positions(const Skeleton& skeleton);

// Bones as segments, head to tail.  A lone-root skeleton has no bones;
// it contributes a zero-length segment at the root so that the bone
// distances below stay defined.
std::vector<Segment> metric_bones(const Skeleton& skeleton);

// Symmetric Chamfer distance between two joint sets: half the sum of
// the two directed mean nearest-neighbor distances.
double chamfer_j2j(const std::vector<Vec3>& pred_joints, const std::vector<Vec3>& ref_joints);

// Average of the two directed joint-to-bone distances: mean over one
// side's joints of the distance to the nearest opposing bone segment.
double j2b(const std::vector<Vec3>& pred_joints, const std::vector<Segment>& pred_bones,
           const std::vector<Vec3>& ref_joints, const std::vector<Segment>& ref_bones);

// Bone-to-bone Chamfer: each bone is sampled uniformly (inclusive
// endpoints) and every sample measures its exact distance to the
// nearest opposing segment; the two directed means are averaged.
double b2b(const std::vector<Segment>& pred_bones, const std::vector<Segment>& ref_bones,
           int samples_per_bone = 32);

// Which point stands in for a bone when skinning columns are pushed
// through a transport plan.  Tail joints are unique per bone, so the
// tail map reproduces the input exactly under an identity plan; head
// joints are shared by sibling bones and midpoints use a bone-level
// plan instead of a joint-level one.
enum class BoneRepresentative {
    kTail,
    kHead,
    kMidpoint,
};

// Re-expresses per-vertex weights over predicted bones as weights over
// reference bones.  The plan's rows are normalized into a stochastic
// map M, each predicted bone b contributes its weight times
// M[bone_to_row[b], bone_to_col[b_ref]], and the result rows are
// renormalized to sum 1.
SkinningMatrix align_skinning(const SkinningMatrix& pred_weights, const TransportPlan& plan,
                              const std::vector<int>& bone_to_row,
                              const std::vector<int>& bone_to_col);

struct SkinMetricConfig {
    int n_points = 8192;
    double epsilon = 1e-8;
    uint64_t seed = 0;
    BoneRepresentative representative = BoneRepresentative::kTail;
};

struct SkinMetrics {
    double l1 = 0.0;
    double l2 = 0.0;
    double kl = 0.0;
};

// Samples the predicted surface, interpolates predicted weights
// barycentrically, fetches reference weights from the nearest point on
// the reference surface, aligns the predicted distribution through an
// exact transport plan between the two skeletons, and reports mean
// per-point l1, l2 and KL(reference || aligned) with additive epsilon
// smoothing.
SkinMetrics skin_metrics(const RiggedAsset& pred, const RiggedAsset& ref,
                         const SkinMetricConfig& config = {});

struct MetricConfig {
    int b2b_samples = 32;
    SkinMetricConfig skin;
};

struct MetricReport {
    // Skeleton distances in normalized units; reports print them x100.
    double j2j = 0.0;
    double j2b = 0.0;
    double b2b = 0.0;
    double skin_l1 = 0.0;
    double skin_l2 = 0.0;
    double skin_kl = 0.0;
    MetricConfig config;
};

// Normalizes both assets independently to the unit box, then computes
// all six metrics.
MetricReport evaluate_pair(const RiggedAsset& pred, const RiggedAsset& ref,
                           const MetricConfig& config = {});

}  // namespace rigkit
