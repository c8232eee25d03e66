#include "rigkit/eval_runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <thread>

#include "rigkit/error.hpp"
#include "rigkit/numeric.hpp"
#include "rigkit/obj_io.hpp"
#include "text_format.hpp"

namespace rigkit {

RiggedAsset load_asset(const std::string& path, BoneNaming naming) {
    const RigDocument doc = load_rig_document(path);
    if (doc.mesh_path.empty())
        throw DataError("\"" + path + "\" has no mesh reference");
    const std::filesystem::path mesh_path =
        std::filesystem::path(path).parent_path() / doc.mesh_path;
    Mesh mesh = load_obj(mesh_path.string()).mesh;
    RiggedAsset asset = assemble_asset(doc, std::move(mesh), naming);
    if (asset.id.empty()) asset.id = std::filesystem::path(path).stem().string();
    return asset;
}

EvalRun run_eval(const EvalManifest& manifest, const std::string& base_dir, int threads) {
    EvalRun run;
    run.config = manifest.config;
    run.skin_names = manifest.skin_names;

    const size_t n = manifest.pairs.size();
    std::vector<PairOutcome> outcomes(n);
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                const EvalPair& pair = manifest.pairs[i];
                const auto resolve = [&](const std::string& p) {
                    const std::filesystem::path fp(p);
                    return fp.is_absolute() ? fp.string()
                                            : (std::filesystem::path(base_dir) / fp).string();
                };
                const RiggedAsset pred = load_asset(resolve(pair.pred_path), manifest.skin_names);
                const RiggedAsset ref = load_asset(resolve(pair.ref_path), manifest.skin_names);

                MetricConfig config = manifest.config;
                config.skin.seed = Rng::fork(manifest.config.skin.seed, i).next_u64();
                outcomes[i] = {pair.id, evaluate_pair(pred, ref, config)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int worker_count = std::max(1, std::min<int>(threads, static_cast<int>(std::max<size_t>(n, 1))));
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(worker_count));
        for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::sort(outcomes.begin(), outcomes.end(),
              [](const PairOutcome& a, const PairOutcome& b) { return a.id < b.id; });
    run.results = std::move(outcomes);
    return run;
}

namespace {

std::string f6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string format_eval_report(const EvalRun& run) {
    std::string out = "rigeval v1 pairs=" + std::to_string(run.results.size()) + "\n";
    out += "config samples_per_bone=" + std::to_string(run.config.b2b_samples) +
           " n_points=" + std::to_string(run.config.skin.n_points) +
           " epsilon=" + g9(run.config.skin.epsilon) +
           " seed=" + std::to_string(run.config.skin.seed) +
           " representative=" + representative_name(run.config.skin.representative) +
           " skin_names=" + bone_naming_name(run.skin_names) + "\n";
    out += "columns id j2j_x100 j2b_x100 b2b_x100 skin_l1 skin_l2 skin_kl\n";

    std::vector<double> j2j, j2b, b2b, l1, l2, kl;
    for (const PairOutcome& o : run.results) {
        out += "pair " + o.id + " " + f6(o.report.j2j * 100.0) + " " + f6(o.report.j2b * 100.0) +
               " " + f6(o.report.b2b * 100.0) + " " + f6(o.report.skin_l1) + " " +
               f6(o.report.skin_l2) + " " + f6(o.report.skin_kl) + "\n";
        j2j.push_back(o.report.j2j);
        j2b.push_back(o.report.j2b);
        b2b.push_back(o.report.b2b);
        l1.push_back(o.report.skin_l1);
        l2.push_back(o.report.skin_l2);
        kl.push_back(o.report.skin_kl);
    }
    out += "mean - " + f6(pairwise_mean(j2j) * 100.0) + " " + f6(pairwise_mean(j2b) * 100.0) + " " +
           f6(pairwise_mean(b2b) * 100.0) + " " + f6(pairwise_mean(l1)) + " " +
           f6(pairwise_mean(l2)) + " " + f6(pairwise_mean(kl)) + "\n";
    return out;
}

}  // namespace rigkit
