#pragma once

#include <string>
#include <vector>

#include "rigkit/manifest.hpp"
#include "rigkit/metrics.hpp"

namespace rigkit {

struct PairOutcome {
    std::string id;
    MetricReport report;
};

struct EvalRun {
    MetricConfig config;
    BoneNaming skin_names = BoneNaming::kTail;
    // Sorted by pair id for reproducible aggregation.
    std::vector<PairOutcome> results;
};

// Loads a rig document plus its referenced mesh (paths relative to the
// document) and densifies the skin.
RiggedAsset load_asset(const std::string& path, BoneNaming naming = BoneNaming::kTail);

// Evaluates every manifest pair, distributing pairs over `threads`
// workers.  Each pair's surface sampling seed is forked from the
// manifest seed and the pair's position, so the outcome is bit-identical
// for any thread count.  Relative paths resolve against base_dir.
EvalRun run_eval(const EvalManifest& manifest, const std::string& base_dir, int threads);

// Fixed-layout text table, one `pair` line per result plus aggregate
// means; skeleton distances are scaled x100.
std::string format_eval_report(const EvalRun& run);

}  // namespace rigkit
