// End-to-end acceptance checks, one line of output per criterion.
// Returns the number of failed criteria as the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rigkit/error.hpp"
#include "rigkit/eval_runner.hpp"
#include "rigkit/labels.hpp"
#include "rigkit/metrics.hpp"
#include "rigkit/obj_io.hpp"
#include "rigkit/rig_document.hpp"
#include "rigkit/skinning.hpp"
#include "rigkit/table_io.hpp"
#include "rigkit/token_codec.hpp"
#include "rigkit/transport.hpp"
#include "rigkit/voxelize.hpp"

using namespace rigkit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// 1. Quantized token round trip: exact topology, bounded joint error.
Outcome token_round_trip() {
    const auto start = Clock::now();
    Rng rng(1001);
    const double bound = std::sqrt(3.0) / 256.0;
    double worst_joint = 0.0, worst_j2j = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Skeleton s = testgen::random_skeleton(rng, 3, 64);
        const BfsResult bfs = bfs_order(s);
        const Skeleton decoded = detokenize(tokenize(s));
        if (decoded.joint_count() != s.joint_count())
            return {false, "joint count changed on trial " + std::to_string(trial)};
        for (int i = 0; i < s.joint_count(); ++i) {
            const int k = bfs.permutation[static_cast<size_t>(i)];
            const Joint& original = s.joints[static_cast<size_t>(i)];
            const Joint& round = decoded.joints[static_cast<size_t>(k)];
            const std::optional<int> expected_parent =
                original.parent ? std::optional<int>(bfs.permutation[static_cast<size_t>(
                                      *original.parent)])
                                : std::nullopt;
            if (round.parent != expected_parent)
                return {false, "topology changed on trial " + std::to_string(trial)};
            worst_joint = std::max(worst_joint, (round.position - original.position).norm());
        }
        worst_j2j = std::max(
            worst_j2j, 100.0 * chamfer_j2j(joint_positions(s), joint_positions(decoded)));
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst_joint <= bound && worst_j2j <= 0.677 && elapsed < 5.0;
    return {pass, "max joint error " + fmt(worst_joint) + " <= " + fmt(bound) + ", max j2j_x100 " +
                      fmt(worst_j2j) + " <= 0.677 (" + fmt(elapsed) + "s < 5s)"};
}

// 2. Token streams ignore joint storage order.
Outcome token_permutation_invariance() {
    const auto start = Clock::now();
    Rng rng(1002);
    const CodecConfig config;
    for (int trial = 0; trial < 200; ++trial) {
        const Skeleton s = testgen::random_skeleton(rng, 3, 64);
        const std::string reference = write_token_stream(tokenize(s), config);
        for (int round = 0; round < 5; ++round) {
            const auto perm = testgen::random_permutation(rng, s.joint_count());
            const Skeleton shuffled = testgen::permute_joints(s, perm);
            if (write_token_stream(tokenize(shuffled), config) != reference)
                return {false, "stream depends on storage order (trial " + std::to_string(trial) +
                                   ")"};
        }
    }
    const double elapsed = seconds_since(start);
    return {elapsed < 5.0, "200 skeletons x 5 permutations byte-identical (" + fmt(elapsed) +
                               "s < 5s)"};
}

// 3. Distance metrics against brute force and refinement stability.
Outcome metric_oracles() {
    Rng rng(1003);
    double worst_chamfer = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Vec3> pred(1 + rng.next_below(24)), ref(1 + rng.next_below(24));
        for (Vec3& p : pred) p = {rng.next_double(), rng.next_double(), rng.next_double()};
        for (Vec3& p : ref) p = {rng.next_double(), rng.next_double(), rng.next_double()};

        auto directed = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
            double total = 0.0;
            for (const Vec3& p : from) {
                double best = std::numeric_limits<double>::infinity();
                for (const Vec3& q : to) best = std::min(best, (p - q).norm());
                total += best;
            }
            return total / static_cast<double>(from.size());
        };
        const double brute = 0.5 * (directed(pred, ref) + directed(ref, pred));
        worst_chamfer = std::max(worst_chamfer, std::abs(chamfer_j2j(pred, ref) - brute));
    }
    if (worst_chamfer > 1e-12)
        return {false, "chamfer deviates from brute force by " + fmt(worst_chamfer)};

    double worst_psd = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 a{rng.next_double(), rng.next_double(), rng.next_double()};
        const Vec3 b{rng.next_double(), rng.next_double(), rng.next_double()};
        const Vec3 p{rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
        double sampled = std::numeric_limits<double>::infinity();
        for (int s = 0; s <= 4096; ++s) {
            const double t = s / 4096.0;
            sampled = std::min(sampled, (a + (b - a) * t - p).norm());
        }
        worst_psd = std::max(worst_psd, std::abs(point_segment_distance(p, a, b) - sampled));
    }
    if (worst_psd > 1e-4)
        return {false, "segment distance deviates from sampling by " + fmt(worst_psd)};

    double worst_b2b = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto pb = metric_bones(testgen::random_skeleton(rng, 8, 64));
        const auto rb = metric_bones(testgen::random_skeleton(rng, 8, 64));
        const double coarse = b2b(pb, rb, 32);
        const double fine = b2b(pb, rb, 64);
        worst_b2b = std::max(worst_b2b, std::abs(fine - coarse) / coarse);
    }
    const bool pass = worst_b2b <= 0.01;
    return {pass, "chamfer err " + fmt(worst_chamfer) + " <= 1e-12, segment err " + fmt(worst_psd) +
                      " <= 1e-4, b2b refinement drift " + fmt(worst_b2b) + " <= 0.01"};
}

// 4. Exact transport against permutation enumeration.
Outcome transport_optimality() {
    const auto start = Clock::now();
    Rng rng(1004);
    double worst_gap = 0.0, worst_marginal = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Matrix cost(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) cost.at(i, j) = rng.next_double();
        const std::vector<double> mass(5, 0.2);
        const TransportPlan plan = solve_ot(cost, mass, mass);

        std::vector<int> perm{0, 1, 2, 3, 4};
        double best = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (int i = 0; i < 5; ++i) total += cost.at(i, perm[static_cast<size_t>(i)]);
            best = std::min(best, total / 5.0);
        } while (std::next_permutation(perm.begin(), perm.end()));
        worst_gap = std::max(worst_gap, std::abs(plan.objective - best));

        for (int i = 0; i < 5; ++i) {
            double row = 0.0, col = 0.0;
            for (int j = 0; j < 5; ++j) {
                row += plan.coupling.at(i, j);
                col += plan.coupling.at(j, i);
            }
            worst_marginal = std::max({worst_marginal, std::abs(row - 0.2), std::abs(col - 0.2)});
        }
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst_gap <= 1e-9 && worst_marginal <= 1e-9 && elapsed < 10.0;
    return {pass, "objective gap " + fmt(worst_gap) + " <= 1e-9, marginal err " +
                      fmt(worst_marginal) + " <= 1e-9 (" + fmt(elapsed) + "s < 10s)"};
}

// 5. Self-evaluation is a zero of all six metrics.
Outcome self_evaluation() {
    Rng rng(1005);
    MetricConfig config;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const RiggedAsset asset = testgen::random_asset(rng);
        const MetricReport r = evaluate_pair(asset, asset, config);
        worst = std::max({worst, std::abs(r.j2j), std::abs(r.j2b), std::abs(r.b2b),
                          std::abs(r.skin_l1), std::abs(r.skin_l2), std::abs(r.skin_kl)});
    }
    return {worst <= 1e-6, "max |metric| over 100 self pairs " + fmt(worst) + " <= 1e-6"};
}

// 6. Softmax / cross-entropy identities.
Outcome softmax_identities() {
    Rng rng(1006);
    const int rows = 1000, bones_n = 6, dim = 4;
    EmbeddingMatrix points(rows, dim + 1), shifted(rows, dim + 1), bones(bones_n, dim + 1);
    for (int b = 0; b < bones_n; ++b) {
        for (int d = 0; d < dim; ++d) bones.at(b, d) = rng.uniform(-1, 1);
        bones.at(b, dim) = 1.0;
    }
    for (int i = 0; i < rows; ++i) {
        for (int d = 0; d < dim; ++d) shifted.at(i, d) = points.at(i, d) = rng.uniform(-3, 3);
        points.at(i, dim) = 0.0;
        shifted.at(i, dim) = rng.uniform(-30, 30);
    }
    const SkinningMatrix base = skinning_from_embeddings(points, bones);
    const SkinningMatrix moved = skinning_from_embeddings(shifted, bones);
    double worst_sum = 0.0, worst_shift = 0.0;
    for (int i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (int b = 0; b < bones_n; ++b) {
            sum += base.weights.at(i, b);
            worst_shift =
                std::max(worst_shift, std::abs(base.weights.at(i, b) - moved.weights.at(i, b)));
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    if (worst_sum > 1e-9) return {false, "row sum error " + fmt(worst_sum) + " > 1e-9"};
    if (worst_shift > 1e-12) return {false, "shift sensitivity " + fmt(worst_shift) + " > 1e-12"};

    SkinningMatrix ref, pred;
    ref.weights = Matrix(1, 2);
    pred.weights = Matrix(1, 2);
    ref.weights.at(0, 0) = 1.0;
    pred.weights.at(0, 0) = pred.weights.at(0, 1) = 0.5;
    const double ce_onehot = soft_cross_entropy(ref, pred);
    ref.weights.at(0, 0) = ref.weights.at(0, 1) = 0.5;
    const double ce_uniform = soft_cross_entropy(ref, pred);
    if (std::abs(ce_onehot - std::log(2.0)) > 1e-9 || std::abs(ce_uniform - std::log(2.0)) > 1e-9)
        return {false, "ln 2 cross-entropy cases off: " + fmt(ce_onehot) + ", " + fmt(ce_uniform)};

    double worst_gibbs = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int cols = 2 + static_cast<int>(rng.next_below(6));
        SkinningMatrix p, q;
        p.weights = Matrix(1, cols);
        q.weights = Matrix(1, cols);
        double ps = 0.0, qs = 0.0;
        for (int c = 0; c < cols; ++c) {
            ps += (p.weights.at(0, c) = rng.uniform(0.01, 1.0));
            qs += (q.weights.at(0, c) = rng.uniform(0.01, 1.0));
        }
        for (int c = 0; c < cols; ++c) {
            p.weights.at(0, c) /= ps;
            q.weights.at(0, c) /= qs;
        }
        worst_gibbs =
            std::max(worst_gibbs, soft_cross_entropy(p, p) - soft_cross_entropy(p, q));
    }
    const bool pass = worst_gibbs <= 1e-12;
    return {pass, "row sums within " + fmt(worst_sum) + ", shift drift " + fmt(worst_shift) +
                      ", ln2 cases exact, Gibbs slack " + fmt(worst_gibbs)};
}

// 7. Bone rasterization equals the dense-sampling limit.
Outcome rasterization_oracle() {
    Rng rng(1007);
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec3 a{rng.next_double(), rng.next_double(), rng.next_double()};
        const Vec3 b{rng.next_double(), rng.next_double(), rng.next_double()};
        const OccupancySet mine = rasterize_bone(a, b);
        if (mine.cells != testgen::segment_cells_oracle(a, b, 64))
            return {false, "cell set deviates from the oracle on trial " + std::to_string(trial)};
        if (!mine.cells.count(voxel_of_point(a, 64)) || !mine.cells.count(voxel_of_point(b, 64)))
            return {false, "endpoint cell missing on trial " + std::to_string(trial)};
        if (!is_26_connected(mine))
            return {false, "disconnected sweep on trial " + std::to_string(trial)};
    }
    return {true, "1000 segments match the dense-sampling oracle, endpoints present, connected"};
}

// 8. Kinematics fixed point and quarter-turn hand cases.
Outcome kinematics_cases() {
    Rng rng(1008);
    double worst_fix = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const RiggedAsset asset = testgen::random_asset(rng);
        const BoneTransforms t =
            forward_kinematics(asset.skeleton, PoseSpec::identity(asset.skeleton.joint_count()));
        const Mesh posed = lbs_pose(asset.mesh, asset.skinning, t);
        for (size_t v = 0; v < posed.vertices.size(); ++v)
            worst_fix =
                std::max(worst_fix, (posed.vertices[v] - asset.mesh.vertices[v]).norm());
    }
    if (worst_fix > 1e-9) return {false, "identity pose moved vertices by " + fmt(worst_fix)};

    const double half_pi = 1.5707963267948966;
    Skeleton chain;
    chain.joints.resize(3);
    chain.joints[0].position = {0, 0, 0};
    chain.joints[1].position = {1, 0, 0};
    chain.joints[1].parent = 0;
    chain.joints[2].position = {2, 0, 0};
    chain.joints[2].parent = 1;

    PoseSpec single = PoseSpec::identity(3);
    single.rotations[0] = Quat::axis_angle({0, 0, 1}, half_pi);
    const BoneTransforms t1 = forward_kinematics(chain, single);
    Mesh probe;
    probe.vertices = {{1, 0, 0}};
    SkinningMatrix w1;
    w1.weights = Matrix(1, 2);
    w1.weights.at(0, 0) = 1.0;
    const double child_err =
        (lbs_pose(probe, w1, t1).vertices[0] - Vec3{0, 1, 0}).norm();

    PoseSpec stacked = PoseSpec::identity(3);
    stacked.rotations[0] = Quat::axis_angle({0, 0, 1}, half_pi);
    stacked.rotations[1] = Quat::axis_angle({0, 0, 1}, half_pi);
    const BoneTransforms t2 = forward_kinematics(chain, stacked);
    Mesh tip;
    tip.vertices = {{2, 0, 0}};
    SkinningMatrix w2;
    w2.weights = Matrix(1, 2);
    w2.weights.at(0, 1) = 1.0;
    const double tip_err = (lbs_pose(tip, w2, t2).vertices[0] - Vec3{-1, 1, 0}).norm();

    const bool pass = child_err <= 1e-9 && tip_err <= 1e-9;
    return {pass, "identity drift " + fmt(worst_fix) + " <= 1e-9, quarter-turn errors " +
                      fmt(child_err) + " / " + fmt(tip_err) + " <= 1e-9"};
}

// 9. Label cleaning table, contrastive loss values, top-k monotonicity.
Outcome label_pipeline() {
    const std::vector<std::pair<std::string, std::string>> table{
        {"metarig--spine.1", "Spine1"},
        {"Armature--mixamorig:LeftForeArm", "LeftForeArm"},
        {"Armature--Mutant:LeftToeBase", "LeftToeBase"},
        {"GLTF_created_0--shoulder.R_Skeleton_14", "RightShoulder"},
        {"Bip001--Bip001_L_UpperArm", "LeftUpperArm"},
        {"group--pasted__Neck", "Neck"},
        {"SK_Female_Rig_V1_MainC--SK_Female_Rig_V1_SH_lShoulderJ", "LeftShoulder"},
    };
    for (const auto& [raw, expected] : table) {
        const auto got = clean_label(raw);
        if (!got || *got != expected)
            return {false, "clean_label(\"" + raw + "\") = \"" + got.value_or("<reject>") +
                               "\", wanted \"" + expected + "\""};
    }
    if (clean_label("Bone003") || clean_label("Joint1"))
        return {false, "generic names were not rejected"};

    Matrix one(1, 2);
    one.at(0, 0) = 1.0;
    if (std::abs(info_nce(one, one, 0.07)) > 1e-9)
        return {false, "single-row loss " + fmt(info_nce(one, one, 0.07)) + " != 0"};
    Matrix same(4, 2);
    for (int i = 0; i < 4; ++i) same.at(i, 0) = 1.0;
    if (std::abs(info_nce(same, same, 0.07) - std::log(4.0)) > 1e-9)
        return {false, "identical-batch loss " + fmt(info_nce(same, same, 0.07)) + " != ln 4"};

    Rng rng(1009);
    for (int trial = 0; trial < 200; ++trial) {
        EmbeddingTable vocab;
        const int nl = 3 + static_cast<int>(rng.next_below(6));
        for (int l = 0; l < nl; ++l) {
            std::vector<double> v(4);
            for (double& x : v) x = rng.uniform(-1, 1);
            if (std::abs(v[0]) < 1e-3) v[0] = 0.5;
            vocab.add("label" + std::to_string(l), v);
        }
        const int joints_n = 1 + static_cast<int>(rng.next_below(8));
        Matrix joints(joints_n, 4);
        std::vector<std::string> truth;
        for (int j = 0; j < joints_n; ++j) {
            for (int d = 0; d < 4; ++d) joints.at(j, d) = rng.uniform(-1, 1);
            truth.push_back("label" + std::to_string(rng.next_below(static_cast<uint64_t>(nl))));
        }
        const auto ranked = assign_labels(joints, vocab, nl);
        double prev = 0.0;
        for (int k = 1; k <= nl; ++k) {
            const double acc = topk_accuracy(ranked, truth, k);
            if (acc < prev - 1e-12)
                return {false, "top-k accuracy decreased at k=" + std::to_string(k)};
            prev = acc;
        }
    }
    return {true, "name table exact, generic names rejected, loss identities hold, top-k monotone"};
}

// 10. Batch evaluation throughput and thread-count reproducibility.
Outcome batch_evaluation() {
    Rng rng(1010);
    const auto dir = testgen::scratch_dir("acceptance-eval");

    EvalManifest manifest;
    const int pairs = 270;
    for (int p = 0; p < pairs; ++p) {
        const std::string tag = "p" + std::to_string(p / 100) + std::to_string(p / 10 % 10) +
                                std::to_string(p % 10);
        for (const char* side : {"pred", "ref"}) {
            const int rings = 16 + static_cast<int>(rng.next_below(35));
            const int segments = 16 + static_cast<int>(rng.next_below(45));
            RiggedAsset asset;
            asset.skeleton = testgen::random_skeleton(rng, 8, 64);
            asset.mesh = testgen::uv_sphere(rings, segments, {0.5, 0.5, 0.5},
                                            rng.uniform(0.25, 0.42));
            asset.skinning =
                prune_influences(heuristic_skin(asset.mesh, asset.skeleton, 12.0), 4);

            RigDocument doc = document_from_asset(asset);
            const std::string stem = tag + "-" + side;
            doc.id = stem;
            doc.mesh_path = stem + ".obj";
            save_obj((dir / doc.mesh_path).string(), asset.mesh);
            save_rig_document((dir / (stem + ".json")).string(), doc);
        }
        manifest.pairs.push_back({tag, tag + "-pred.json", tag + "-ref.json"});
    }

    const auto start = Clock::now();
    const EvalRun serial = run_eval(manifest, dir.string(), 1);
    const double elapsed = seconds_since(start);

    const std::string report = format_eval_report(serial);
    const bool match2 = format_eval_report(run_eval(manifest, dir.string(), 2)) == report;
    const bool match8 = format_eval_report(run_eval(manifest, dir.string(), 8)) == report;
    std::filesystem::remove_all(dir);

    const bool pass = elapsed < 120.0 && match2 && match8;
    return {pass, std::to_string(pairs) + " pairs in " + fmt(elapsed) +
                      "s < 120s single-threaded, reports " +
                      (match2 && match8 ? "bit-identical at 1/2/8 threads" : "DIVERGE")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"token round trip", token_round_trip},
        {"token permutation invariance", token_permutation_invariance},
        {"metric oracles", metric_oracles},
        {"transport optimality", transport_optimality},
        {"self evaluation", self_evaluation},
        {"softmax identities", softmax_identities},
        {"rasterization oracle", rasterization_oracle},
        {"kinematics cases", kinematics_cases},
        {"label pipeline", label_pipeline},
        {"batch evaluation", batch_evaluation},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("[%s] %zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
