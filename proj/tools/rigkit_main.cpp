#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rigkit/error.hpp"
#include "rigkit/eval_runner.hpp"
#include "rigkit/labels.hpp"
#include "rigkit/manifest.hpp"
#include "rigkit/metrics.hpp"
#include "rigkit/obj_io.hpp"
#include "rigkit/render.hpp"
#include "rigkit/rig.hpp"
#include "rigkit/rig_document.hpp"
#include "rigkit/rignet_io.hpp"
#include "rigkit/skinning.hpp"
#include "rigkit/table_io.hpp"
#include "rigkit/token_codec.hpp"
#include "rigkit/voxelize.hpp"

namespace {

using namespace rigkit;

// Writes to the given path, or stdout when the path is empty.
void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_text_file(out_path, content);
    }
}

std::string sibling_path(const std::string& anchor, const std::string& relative) {
    const std::filesystem::path p(relative);
    if (p.is_absolute()) return relative;
    return (std::filesystem::path(anchor).parent_path() / p).string();
}

// Loads the document plus its mesh when one is referenced.  Documents
// in the RigNet text layout are accepted via extension ".txt".
RigDocument load_any_document(const std::string& path) {
    if (std::filesystem::path(path).extension() == ".txt")
        return rignet_to_document(parse_rignet_rig(read_text_file(path)));
    return load_rig_document(path);
}

struct LoadedRig {
    RigDocument doc;
    Mesh mesh;
    Skeleton skeleton;
};

LoadedRig load_rig(const std::string& path, const std::string& mesh_override,
                   bool checked_tree = true) {
    LoadedRig rig;
    rig.doc = load_any_document(path);
    std::string mesh_path = mesh_override;
    if (mesh_path.empty() && !rig.doc.mesh_path.empty())
        mesh_path = sibling_path(path, rig.doc.mesh_path);
    if (!mesh_path.empty()) {
        auto parsed = load_obj(mesh_path);
        for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
        rig.mesh = std::move(parsed.mesh);
    }
    rig.skeleton = checked_tree ? document_skeleton(rig.doc) : document_skeleton_raw(rig.doc);
    return rig;
}

int run_normalize(const std::string& in_path, const std::string& out_path,
                  const std::string& mesh_in, const std::string& mesh_out) {
    LoadedRig rig = load_rig(in_path, mesh_in);
    RiggedAsset asset;
    asset.mesh = std::move(rig.mesh);
    asset.skeleton = std::move(rig.skeleton);
    const auto [normalized, record] = normalize_unit_box(asset);

    RigDocument doc = rig.doc;
    for (size_t j = 0; j < doc.joints.size(); ++j)
        doc.joints[j].position = normalized.skeleton.joints[j].position;
    doc.normalization = record;
    doc.units = "normalized";
    if (!mesh_out.empty()) {
        save_obj(mesh_out, normalized.mesh);
        doc.mesh_path = std::filesystem::path(mesh_out).filename().string();
    }
    emit(out_path, write_rig_document(doc));
    return 0;
}

int run_validate(const std::string& in_path, const std::string& mesh_in) {
    LoadedRig rig = load_rig(in_path, mesh_in, /*checked_tree=*/false);
    RiggedAsset asset;
    if (validate_skeleton(rig.skeleton).empty()) {
        asset = assemble_asset(rig.doc, std::move(rig.mesh));
    } else {
        // Densifying the skin needs a rooted tree; report the structural
        // violations instead of failing on assembly.
        asset.id = rig.doc.id;
        asset.skeleton = std::move(rig.skeleton);
        asset.mesh = std::move(rig.mesh);
        asset.skinning = SkinningMatrix(static_cast<int>(asset.mesh.vertices.size()), 0);
    }
    const ValidationReport report = validate_asset(asset);
    for (const Violation& v : report) {
        std::cout << v.code;
        if (v.index >= 0) std::cout << " [" << v.index << "]";
        std::cout << ": " << v.detail << "\n";
    }
    if (report.empty()) {
        std::cout << "valid: " << asset.mesh.vertices.size() << " vertices, "
                  << asset.skeleton.joints.size() << " joints, "
                  << asset.skeleton.bones().size() << " bones\n";
        return 0;
    }
    return 1;
}

int run_tokenize(const std::string& in_path, const std::string& out_path, int resolution,
                 int max_joints, bool normalize) {
    LoadedRig rig = load_rig(in_path, "");
    Skeleton skeleton = std::move(rig.skeleton);
    if (normalize) {
        RiggedAsset asset;
        asset.mesh = std::move(rig.mesh);
        asset.skeleton = std::move(skeleton);
        skeleton = normalize_unit_box(asset).first.skeleton;
    }
    CodecConfig config;
    config.grid_resolution = resolution;
    config.max_joints = max_joints;
    emit(out_path, write_token_stream(tokenize(skeleton, config), config));
    return 0;
}

int run_detokenize(const std::string& in_path, const std::string& out_path) {
    const auto [sequence, config] = read_token_stream(read_text_file(in_path));
    const Skeleton skeleton = detokenize(sequence, config);
    RiggedAsset asset;
    asset.skeleton = skeleton;
    emit(out_path, write_rig_document(document_from_asset(asset)));
    return 0;
}

int run_voxelize_bones(const std::string& in_path, const std::string& out_path, int resolution) {
    const LoadedRig rig = load_rig(in_path, "");
    OccupancySet merged;
    merged.resolution = resolution;
    const auto bones = rig.skeleton.bones();
    if (bones.empty()) {
        const Vec3 p = rig.skeleton.joints[static_cast<size_t>(rig.skeleton.root())].position;
        merged = rasterize_bone(p, p, resolution);
    }
    for (const Bone& b : bones) {
        const OccupancySet swept =
            rasterize_bone(rig.skeleton.head_of(b), rig.skeleton.tail_of(b), resolution);
        merged.cells.insert(swept.cells.begin(), swept.cells.end());
    }
    emit(out_path, write_occupancy(merged));
    return 0;
}

int run_bone_features(const std::string& in_path, const std::string& features_path,
                      const std::string& out_path, int resolution, double epsilon) {
    LoadedRig rig = load_rig(in_path, "");
    RiggedAsset asset = assemble_asset(rig.doc, std::move(rig.mesh));
    const Matrix vertex_features = read_indexed_matrix(read_text_file(features_path));
    if (vertex_features.rows != static_cast<int>(asset.mesh.vertices.size()))
        throw DataError("feature rows differ from mesh vertex count");

    const auto bones = asset.skeleton.bones();
    Matrix bone_features(static_cast<int>(bones.size()), vertex_features.cols);
    std::vector<double> column(static_cast<size_t>(asset.skinning.vertex_count()));
    std::vector<std::pair<Vec3, Vec3>> segments;
    for (size_t b = 0; b < bones.size(); ++b) {
        for (int v = 0; v < asset.skinning.vertex_count(); ++v)
            column[static_cast<size_t>(v)] = asset.skinning.weights.at(v, static_cast<int>(b));
        const auto pooled = pool_bone_feature(column, vertex_features, epsilon);
        for (int d = 0; d < bone_features.cols; ++d)
            bone_features.at(static_cast<int>(b), d) = pooled[static_cast<size_t>(d)];
        segments.emplace_back(asset.skeleton.head_of(bones[b]), asset.skeleton.tail_of(bones[b]));
    }
    emit(out_path, write_feature_grid(build_skeleton_grid(segments, bone_features, resolution)));
    return 0;
}

int run_skin_heuristic(const std::string& in_path, const std::string& out_path, double sharpness) {
    LoadedRig rig = load_rig(in_path, "");
    if (rig.mesh.vertices.empty()) throw DataError("skin-heuristic needs a mesh");
    RiggedAsset asset;
    asset.id = rig.doc.id;
    asset.mesh = std::move(rig.mesh);
    asset.skeleton = std::move(rig.skeleton);
    asset.skinning = heuristic_skin(asset.mesh, asset.skeleton, sharpness);

    RigDocument doc = document_from_asset(asset);
    doc.mesh_path = rig.doc.mesh_path;
    doc.units = rig.doc.units;
    doc.normalization = rig.doc.normalization;
    emit(out_path, write_rig_document(doc));
    return 0;
}

int run_skin_from_embeddings(const std::string& points_path, const std::string& bones_path,
                             const std::string& out_path) {
    const Matrix points = read_indexed_matrix(read_text_file(points_path));
    const Matrix bones = read_indexed_matrix(read_text_file(bones_path));
    const SkinningMatrix skin = skinning_from_embeddings(points, bones);
    emit(out_path, write_indexed_matrix(skin.weights));
    return 0;
}

int run_pose(const std::string& in_path, const std::string& pose_path,
             const std::string& out_path, const std::string& mesh_in) {
    LoadedRig rig = load_rig(in_path, mesh_in);
    RiggedAsset asset = assemble_asset(rig.doc, std::move(rig.mesh));
    if (asset.mesh.vertices.empty()) throw DataError("pose needs a mesh");
    const PoseSpec pose =
        read_pose(read_text_file(pose_path), asset.skeleton.joint_count());
    const BoneTransforms transforms = forward_kinematics(asset.skeleton, pose);
    const Mesh posed = lbs_pose(asset.mesh, asset.skinning, transforms);
    if (out_path.empty()) {
        std::cout << write_obj(posed);
    } else {
        save_obj(out_path, posed);
    }
    return 0;
}

int run_eval(const std::string& manifest_path, const std::string& out_path, int threads,
             bool seed_given, uint64_t seed) {
    EvalManifest manifest = load_eval_manifest(manifest_path);
    if (seed_given) manifest.config.skin.seed = seed;
    const std::string base_dir = std::filesystem::path(manifest_path).parent_path().string();
    const EvalRun run = rigkit::run_eval(manifest, base_dir, threads);
    emit(out_path, format_eval_report(run));
    return 0;
}

int run_label_assign(const std::string& joints_path, const std::string& vocab_path, int k,
                     const std::string& out_path) {
    const JointEmbeddings joints = read_joint_embeddings(read_text_file(joints_path));
    for (const std::string& w : joints.warnings) std::cerr << "warning: " << w << "\n";
    const EmbeddingTableResult vocab = read_embedding_table(read_text_file(vocab_path));
    for (const std::string& w : vocab.warnings) std::cerr << "warning: " << w << "\n";

    const auto ranked = assign_labels(joints.vectors, vocab.table, k);
    std::string out;
    char buf[64];
    for (size_t j = 0; j < ranked.size(); ++j) {
        out += std::to_string(j) + " " + joints.names[j];
        for (const LabelScore& ls : ranked[j]) {
            std::snprintf(buf, sizeof(buf), " %s=%.6f", ls.label.c_str(), ls.score);
            out += buf;
        }
        out += "\n";
    }
    emit(out_path, out);
    return 0;
}

int run_label_clean(const std::vector<std::string>& raw, const std::string& file_path,
                    const std::string& out_path) {
    std::vector<std::string> inputs = raw;
    if (!file_path.empty()) {
        std::istringstream in(read_text_file(file_path));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) inputs.push_back(line);
        }
    }
    std::string out;
    for (const std::string& label : inputs) {
        const auto cleaned = clean_label(label);
        out += label + " -> " + (cleaned ? *cleaned : "REJECT") + "\n";
    }
    emit(out_path, out);
    return 0;
}

int run_label_score(const std::string& joints_path, const std::string& labels_path,
                    double temperature) {
    const JointEmbeddings joints = read_joint_embeddings(read_text_file(joints_path));
    const JointEmbeddings labels = read_joint_embeddings(read_text_file(labels_path));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "info_nce %.9g\n", info_nce(joints.vectors, labels.vectors, temperature));
    std::cout << buf;
    return 0;
}

int run_render(const std::string& in_path, const std::string& out_path, int size) {
    const LoadedRig rig = load_rig(in_path, "");
    emit(out_path, render_skeleton_svg(rig.skeleton, size));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigkit: skeleton tokenization, voxelization, skinning and evaluation"};
    app.require_subcommand(1);
    int exit_code = 0;

    // normalize
    std::string n_in, n_out, n_mesh_in, n_mesh_out;
    auto* normalize = app.add_subcommand("normalize", "rescale a rig into the unit box");
    normalize->add_option("input", n_in, "rig document")->required();
    normalize->add_option("-o,--output", n_out, "output document (stdout when omitted)");
    normalize->add_option("--mesh", n_mesh_in, "mesh to load instead of the document reference");
    normalize->add_option("--mesh-out", n_mesh_out, "write the normalized mesh here");
    normalize->callback([&] { exit_code = run_normalize(n_in, n_out, n_mesh_in, n_mesh_out); });

    // validate
    std::string v_in, v_mesh;
    auto* validate = app.add_subcommand("validate", "check structural invariants of a rig");
    validate->add_option("input", v_in, "rig document")->required();
    validate->add_option("--mesh", v_mesh, "mesh to load instead of the document reference");
    validate->callback([&] { exit_code = run_validate(v_in, v_mesh); });

    // tokenize
    std::string t_in, t_out;
    int t_res = 128, t_max = 256;
    bool t_norm = false;
    auto* tokenize_cmd = app.add_subcommand("tokenize", "encode a skeleton as a token stream");
    tokenize_cmd->add_option("input", t_in, "rig document")->required();
    tokenize_cmd->add_option("-o,--output", t_out, "token stream file");
    tokenize_cmd->add_option("--resolution", t_res, "quantization grid resolution")
        ->check(CLI::PositiveNumber);
    tokenize_cmd->add_option("--max-joints", t_max, "sequence capacity")->check(CLI::PositiveNumber);
    tokenize_cmd->add_flag("--normalize", t_norm, "normalize to the unit box first");
    tokenize_cmd->callback([&] { exit_code = run_tokenize(t_in, t_out, t_res, t_max, t_norm); });

    // detokenize
    std::string d_in, d_out;
    auto* detokenize_cmd = app.add_subcommand("detokenize", "decode a token stream into a rig document");
    detokenize_cmd->add_option("input", d_in, "token stream file")->required();
    detokenize_cmd->add_option("-o,--output", d_out, "output document");
    detokenize_cmd->callback([&] { exit_code = run_detokenize(d_in, d_out); });

    // voxelize-bones
    std::string vb_in, vb_out;
    int vb_res = 64;
    auto* voxelize_cmd = app.add_subcommand("voxelize-bones", "rasterize all bones into a voxel set");
    voxelize_cmd->add_option("input", vb_in, "rig document")->required();
    voxelize_cmd->add_option("-o,--output", vb_out, "occupancy file");
    voxelize_cmd->add_option("--resolution", vb_res, "grid resolution")->check(CLI::PositiveNumber);
    voxelize_cmd->callback([&] { exit_code = run_voxelize_bones(vb_in, vb_out, vb_res); });

    // bone-features
    std::string bf_in, bf_feat, bf_out;
    int bf_res = 64;
    double bf_eps = 1e-8;
    auto* features_cmd = app.add_subcommand("bone-features",
                                            "pool vertex features per bone onto the voxel grid");
    features_cmd->add_option("input", bf_in, "rig document with mesh and skin")->required();
    features_cmd->add_option("--features", bf_feat, "per-vertex feature matrix")->required();
    features_cmd->add_option("-o,--output", bf_out, "feature grid file");
    features_cmd->add_option("--resolution", bf_res, "grid resolution")->check(CLI::PositiveNumber);
    features_cmd->add_option("--epsilon", bf_eps, "pooling denominator epsilon");
    features_cmd->callback(
        [&] { exit_code = run_bone_features(bf_in, bf_feat, bf_out, bf_res, bf_eps); });

    // skin-heuristic
    std::string sh_in, sh_out;
    double sh_sharpness = 10.0;
    auto* heuristic_cmd = app.add_subcommand("skin-heuristic",
                                             "distance-based skinning baseline for a rigged mesh");
    heuristic_cmd->add_option("input", sh_in, "rig document with mesh")->required();
    heuristic_cmd->add_option("-o,--output", sh_out, "output document");
    heuristic_cmd->add_option("--sharpness", sh_sharpness, "softmax sharpness");
    heuristic_cmd->callback([&] { exit_code = run_skin_heuristic(sh_in, sh_out, sh_sharpness); });

    // skin-from-embeddings
    std::string se_points, se_bones, se_out;
    auto* embed_cmd = app.add_subcommand("skin-from-embeddings",
                                         "softmax point/bone affinities from embedding matrices");
    embed_cmd->add_option("--points", se_points, "point embedding matrix")->required();
    embed_cmd->add_option("--bones", se_bones, "bone embedding matrix")->required();
    embed_cmd->add_option("-o,--output", se_out, "weight matrix file");
    embed_cmd->callback([&] { exit_code = run_skin_from_embeddings(se_points, se_bones, se_out); });

    // pose
    std::string p_in, p_pose, p_out, p_mesh;
    auto* pose_cmd = app.add_subcommand("pose", "apply a pose with linear blend skinning");
    pose_cmd->add_option("input", p_in, "rig document with mesh and skin")->required();
    pose_cmd->add_option("--pose", p_pose, "pose file")->required();
    pose_cmd->add_option("-o,--output", p_out, "posed mesh (OBJ)");
    pose_cmd->add_option("--mesh", p_mesh, "mesh to load instead of the document reference");
    pose_cmd->callback([&] { exit_code = run_pose(p_in, p_pose, p_out, p_mesh); });

    // eval
    std::string e_manifest, e_out;
    int e_threads = 1;
    uint64_t e_seed = 0;
    auto* eval_cmd = app.add_subcommand("eval", "batch metric evaluation over a manifest");
    eval_cmd->add_option("manifest", e_manifest, "eval manifest")->required();
    eval_cmd->add_option("-o,--output", e_out, "report file (stdout when omitted)");
    eval_cmd->add_option("--threads", e_threads, "worker thread cap")
        ->envname("RIGKIT_THREADS")
        ->check(CLI::PositiveNumber);
    auto* seed_opt = eval_cmd->add_option("--seed", e_seed, "override the manifest sampling seed");
    eval_cmd->callback([&] {
        exit_code = run_eval(e_manifest, e_out, e_threads, seed_opt->count() > 0, e_seed);
    });

    // label-assign
    std::string la_joints, la_vocab, la_out;
    int la_k = 3;
    auto* assign_cmd = app.add_subcommand("label-assign",
                                          "rank vocabulary labels for each joint embedding");
    assign_cmd->add_option("--joints", la_joints, "joint embedding file")->required();
    assign_cmd->add_option("--vocab", la_vocab, "embedding table file")->required();
    assign_cmd->add_option("-k,--top", la_k, "list length")->check(CLI::PositiveNumber);
    assign_cmd->add_option("-o,--output", la_out, "ranking file (stdout when omitted)");
    assign_cmd->callback([&] { exit_code = run_label_assign(la_joints, la_vocab, la_k, la_out); });

    // label-clean
    std::vector<std::string> lc_raw;
    std::string lc_file, lc_out;
    auto* clean_cmd = app.add_subcommand("label-clean", "normalize raw joint names");
    clean_cmd->add_option("labels", lc_raw, "raw labels");
    clean_cmd->add_option("--file", lc_file, "file with one raw label per line");
    clean_cmd->add_option("-o,--output", lc_out, "output file (stdout when omitted)");
    clean_cmd->callback([&] { exit_code = run_label_clean(lc_raw, lc_file, lc_out); });

    // label-score
    std::string ls_joints, ls_labels;
    double ls_temperature = 0.07;
    auto* score_cmd = app.add_subcommand("label-score",
                                         "contrastive loss between matched joint and label embeddings");
    score_cmd->add_option("--joints", ls_joints, "joint embedding file")->required();
    score_cmd->add_option("--labels", ls_labels, "label embedding file (same indexed format)")
        ->required();
    score_cmd->add_option("--temperature", ls_temperature, "softmax temperature");
    score_cmd->callback([&] { exit_code = run_label_score(ls_joints, ls_labels, ls_temperature); });

    // render-skeleton
    std::string r_in, r_out;
    int r_size = 512;
    auto* render_cmd = app.add_subcommand("render-skeleton", "project a skeleton to an SVG figure");
    render_cmd->add_option("input", r_in, "rig document")->required();
    render_cmd->add_option("-o,--output", r_out, "SVG file (stdout when omitted)");
    render_cmd->add_option("--size", r_size, "canvas size in pixels")->check(CLI::PositiveNumber);
    render_cmd->callback([&] { exit_code = run_render(r_in, r_out, r_size); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const rigkit::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
