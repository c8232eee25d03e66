#pragma once

#include <string>
#include <vector>

#include "rigkit/metrics.hpp"
#include "rigkit/rig_document.hpp"

namespace rigkit {

struct EvalPair {
    std::string id;
    std::string pred_path;
    std::string ref_path;
};

// Drives a batch evaluation: which asset pairs to compare and with
// which metric configuration.  Paths are relative to the manifest file.
struct EvalManifest {
    MetricConfig config;
    BoneNaming skin_names = BoneNaming::kTail;
    std::vector<EvalPair> pairs;
};

EvalManifest read_eval_manifest(const std::string& text);
std::string write_eval_manifest(const EvalManifest& manifest);

EvalManifest load_eval_manifest(const std::string& path);
void save_eval_manifest(const std::string& path, const EvalManifest& manifest);

const char* representative_name(BoneRepresentative r);
BoneRepresentative parse_representative(const std::string& name);
const char* bone_naming_name(BoneNaming n);
BoneNaming parse_bone_naming(const std::string& name);

}  // namespace rigkit
