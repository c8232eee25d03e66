#include "rigkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rigkit/error.hpp"
#include "rigkit/numeric.hpp"
#include "rigkit/surface.hpp"

namespace rigkit {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double len2 = d.norm2();
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return (p - (a + d * t)).norm();
}

std::vector<Vec3> joint_positions(const Skeleton& skeleton) {
    std::vector<Vec3> out;
    out.reserve(skeleton.joints.size());
    for (const auto& j : skeleton.joints) out.push_back(j.position);
    return out;
}

std::vector<Segment> metric_bones(const Skeleton& skeleton) {
    std::vector<Segment> out;
    for (const Bone& b : skeleton.bones()) out.push_back({skeleton.head_of(b), skeleton.tail_of(b)});
    if (out.empty()) {
        const Vec3 p = skeleton.joints.at(static_cast<size_t>(skeleton.root())).position;
        out.push_back({p, p});
    }
    return out;
}

namespace {

double nearest_point_distance(const Vec3& p, const std::vector<Vec3>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : points) best = std::min(best, (p - q).norm());
    return best;
}

double nearest_segment_distance(const Vec3& p, const std::vector<Segment>& segments) {
    double best = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments) best = std::min(best, point_segment_distance(p, s.a, s.b));
    return best;
}

double directed_point_mean(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    std::vector<double> d;
    d.reserve(from.size());
    for (const Vec3& p : from) d.push_back(nearest_point_distance(p, to));
    return pairwise_mean(d);
}

double directed_segment_mean(const std::vector<Vec3>& from, const std::vector<Segment>& to) {
    std::vector<double> d;
    d.reserve(from.size());
    for (const Vec3& p : from) d.push_back(nearest_segment_distance(p, to));
    return pairwise_mean(d);
}

}  // namespace

double chamfer_j2j(const std::vector<Vec3>& pred_joints, const std::vector<Vec3>& ref_joints) {
    if (pred_joints.empty() || ref_joints.empty()) throw DataError("empty joint set");
    return 0.5 * (directed_point_mean(pred_joints, ref_joints) +
                  directed_point_mean(ref_joints, pred_joints));
}

double j2b(const std::vector<Vec3>& pred_joints, const std::vector<Segment>& pred_bones,
           const std::vector<Vec3>& ref_joints, const std::vector<Segment>& ref_bones) {
    if (pred_joints.empty() || ref_joints.empty()) throw DataError("empty joint set");
    if (pred_bones.empty() || ref_bones.empty()) throw DataError("empty bone set");
    return 0.5 * (directed_segment_mean(pred_joints, ref_bones) +
                  directed_segment_mean(ref_joints, pred_bones));
}

namespace {

double directed_b2b(const std::vector<Segment>& from, const std::vector<Segment>& to,
                    int samples_per_bone) {
    std::vector<double> d;
    d.reserve(from.size() * static_cast<size_t>(samples_per_bone));
    const double step = 1.0 / static_cast<double>(samples_per_bone - 1);
    for (const Segment& s : from) {
        for (int i = 0; i < samples_per_bone; ++i) {
            const double t = static_cast<double>(i) * step;
            d.push_back(nearest_segment_distance(s.a + (s.b - s.a) * t, to));
        }
    }
    return pairwise_mean(d);
}

}  // namespace

double b2b(const std::vector<Segment>& pred_bones, const std::vector<Segment>& ref_bones,
           int samples_per_bone) {
    if (pred_bones.empty() || ref_bones.empty()) throw DataError("empty bone set");
    if (samples_per_bone < 2) throw DataError("b2b needs at least two samples per bone");
    return 0.5 * (directed_b2b(pred_bones, ref_bones, samples_per_bone) +
                  directed_b2b(ref_bones, pred_bones, samples_per_bone));
}

SkinningMatrix align_skinning(const SkinningMatrix& pred_weights, const TransportPlan& plan,
                              const std::vector<int>& bone_to_row,
                              const std::vector<int>& bone_to_col) {
    if (static_cast<int>(bone_to_row.size()) != pred_weights.bone_count())
        throw DataError("align_skinning: bone map size differs from weight columns");
    for (int r : bone_to_row)
        if (r < 0 || r >= plan.coupling.rows) throw DataError("align_skinning: map out of range");
    for (int c : bone_to_col)
        if (c < 0 || c >= plan.coupling.cols) throw DataError("align_skinning: map out of range");

    const int n_pred = pred_weights.bone_count();
    const int n_ref = static_cast<int>(bone_to_col.size());

    // Bone-level stochastic map: plan row of the predicted bone's
    // representative, normalized, sampled at each reference representative.
    Matrix map(n_pred, n_ref);
    for (int bp = 0; bp < n_pred; ++bp) {
        const int row = bone_to_row[static_cast<size_t>(bp)];
        double row_sum = 0.0;
        for (int j = 0; j < plan.coupling.cols; ++j) row_sum += plan.coupling.at(row, j);
        if (row_sum <= 0.0) continue;
        for (int br = 0; br < n_ref; ++br)
            map.at(bp, br) = plan.coupling.at(row, bone_to_col[static_cast<size_t>(br)]) / row_sum;
    }

    SkinningMatrix aligned(pred_weights.vertex_count(), n_ref);
    for (int v = 0; v < pred_weights.vertex_count(); ++v) {
        auto out = aligned.weights.row(v);
        for (int bp = 0; bp < n_pred; ++bp) {
            const double w = pred_weights.weights.at(v, bp);
            if (w == 0.0) continue;
            for (int br = 0; br < n_ref; ++br) out[static_cast<size_t>(br)] += w * map.at(bp, br);
        }
        double sum = 0.0;
        for (double x : out) sum += x;
        if (sum > 0.0) {
            for (double& x : out) x /= sum;
        } else {
            const double uniform = 1.0 / static_cast<double>(n_ref);
            for (double& x : out) x = uniform;
        }
    }
    return aligned;
}

namespace {

struct AlignmentSetup {
    TransportPlan plan;
    std::vector<int> pred_map;
    std::vector<int> ref_map;
};

Matrix euclidean_cost(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    Matrix cost(static_cast<int>(a.size()), static_cast<int>(b.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            cost.at(static_cast<int>(i), static_cast<int>(j)) = (a[i] - b[j]).norm();
    return cost;
}

std::vector<double> uniform_mass(size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

AlignmentSetup build_alignment(const Skeleton& pred, const Skeleton& ref,
                               BoneRepresentative representative) {
    const auto pred_bones = pred.bones();
    const auto ref_bones = ref.bones();
    if (pred_bones.empty() || ref_bones.empty())
        throw DataError("skinning metrics need at least one bone per skeleton");

    AlignmentSetup setup;
    if (representative == BoneRepresentative::kMidpoint) {
        std::vector<Vec3> pm, rm;
        for (const Bone& b : pred_bones) pm.push_back((pred.head_of(b) + pred.tail_of(b)) * 0.5);
        for (const Bone& b : ref_bones) rm.push_back((ref.head_of(b) + ref.tail_of(b)) * 0.5);
        setup.plan = solve_ot(euclidean_cost(pm, rm), uniform_mass(pm.size()), uniform_mass(rm.size()));
        setup.pred_map.resize(pred_bones.size());
        setup.ref_map.resize(ref_bones.size());
        for (size_t i = 0; i < pred_bones.size(); ++i) setup.pred_map[i] = static_cast<int>(i);
        for (size_t i = 0; i < ref_bones.size(); ++i) setup.ref_map[i] = static_cast<int>(i);
        return setup;
    }

    const auto pj = joint_positions(pred);
    const auto rj = joint_positions(ref);
    setup.plan = solve_ot(euclidean_cost(pj, rj), uniform_mass(pj.size()), uniform_mass(rj.size()));
    const bool tail = representative == BoneRepresentative::kTail;
    for (const Bone& b : pred_bones) setup.pred_map.push_back(tail ? b.tail_joint : b.head_joint);
    for (const Bone& b : ref_bones) setup.ref_map.push_back(tail ? b.tail_joint : b.head_joint);
    return setup;
}

}  // namespace

SkinMetrics skin_metrics(const RiggedAsset& pred, const RiggedAsset& ref,
                         const SkinMetricConfig& config) {
    if (config.n_points <= 0) throw DataError("skin_metrics: sample count must be positive");
    if (!(config.epsilon > 0.0)) throw DataError("skin_metrics: epsilon must be positive");

    const AlignmentSetup setup = build_alignment(pred.skeleton, ref.skeleton, config.representative);
    const int n_pred = pred.skinning.bone_count();
    const int n_ref = ref.skinning.bone_count();

    const SurfaceSamples samples = sample_surface(pred.mesh, config.n_points, config.seed);
    const int n = static_cast<int>(samples.points.size());

    SkinningMatrix sampled(n, n_pred);
    for (int s = 0; s < n; ++s) {
        const auto& face = pred.mesh.faces[static_cast<size_t>(samples.triangles[static_cast<size_t>(s)])];
        const auto& bary = samples.barycentric[static_cast<size_t>(s)];
        for (int corner = 0; corner < 3; ++corner) {
            const int vertex = face[static_cast<size_t>(corner)];
            const double bw = bary[static_cast<size_t>(corner)];
            for (int b = 0; b < n_pred; ++b)
                sampled.weights.at(s, b) += bw * pred.skinning.weights.at(vertex, b);
        }
    }

    const SkinningMatrix aligned = align_skinning(sampled, setup.plan, setup.pred_map, setup.ref_map);

    const TriangleBvh ref_surface(ref.mesh);
    std::vector<double> l1_terms(static_cast<size_t>(n));
    std::vector<double> l2_terms(static_cast<size_t>(n));
    std::vector<double> kl_terms(static_cast<size_t>(n));
    std::vector<double> ref_row(static_cast<size_t>(n_ref));
    for (int s = 0; s < n; ++s) {
        const SurfaceHit hit = ref_surface.nearest(samples.points[static_cast<size_t>(s)]);
        const auto& face = ref.mesh.faces[static_cast<size_t>(hit.triangle)];
        std::fill(ref_row.begin(), ref_row.end(), 0.0);
        for (int corner = 0; corner < 3; ++corner) {
            const int vertex = face[static_cast<size_t>(corner)];
            const double bw = hit.barycentric[static_cast<size_t>(corner)];
            for (int b = 0; b < n_ref; ++b)
                ref_row[static_cast<size_t>(b)] += bw * ref.skinning.weights.at(vertex, b);
        }

        double l1 = 0.0;
        double l2 = 0.0;
        double ref_smooth_sum = 0.0;
        double aligned_smooth_sum = 0.0;
        for (int b = 0; b < n_ref; ++b) {
            const double diff = aligned.weights.at(s, b) - ref_row[static_cast<size_t>(b)];
            l1 += std::abs(diff);
            l2 += diff * diff;
            ref_smooth_sum += ref_row[static_cast<size_t>(b)] + config.epsilon;
            aligned_smooth_sum += aligned.weights.at(s, b) + config.epsilon;
        }
        double kl = 0.0;
        for (int b = 0; b < n_ref; ++b) {
            const double p = (ref_row[static_cast<size_t>(b)] + config.epsilon) / ref_smooth_sum;
            const double q = (aligned.weights.at(s, b) + config.epsilon) / aligned_smooth_sum;
            kl += p * std::log(p / q);
        }
        l1_terms[static_cast<size_t>(s)] = l1;
        l2_terms[static_cast<size_t>(s)] = std::sqrt(l2);
        kl_terms[static_cast<size_t>(s)] = kl;
    }

    SkinMetrics out;
    out.l1 = pairwise_mean(l1_terms);
    out.l2 = pairwise_mean(l2_terms);
    out.kl = pairwise_mean(kl_terms);
    return out;
}

MetricReport evaluate_pair(const RiggedAsset& pred, const RiggedAsset& ref,
                           const MetricConfig& config) {
    const RiggedAsset p = normalize_unit_box(pred).first;
    const RiggedAsset r = normalize_unit_box(ref).first;

    const auto pj = joint_positions(p.skeleton);
    const auto rj = joint_positions(r.skeleton);
    const auto pb = metric_bones(p.skeleton);
    const auto rb = metric_bones(r.skeleton);

    MetricReport report;
    report.j2j = chamfer_j2j(pj, rj);
    report.j2b = j2b(pj, pb, rj, rb);
    report.b2b = b2b(pb, rb, config.b2b_samples);
    const SkinMetrics skin = skin_metrics(p, r, config.skin);
    report.skin_l1 = skin.l1;
    report.skin_l2 = skin.l2;
    report.skin_kl = skin.kl;
    report.config = config;
    return report;
}

}  // namespace rigkit
