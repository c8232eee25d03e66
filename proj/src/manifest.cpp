#include "rigkit/manifest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "rigkit/error.hpp"
#include "text_format.hpp"

namespace rigkit {

const char* representative_name(BoneRepresentative r) {
    switch (r) {
        case BoneRepresentative::kTail: return "tail";
        case BoneRepresentative::kHead: return "head";
        case BoneRepresentative::kMidpoint: return "midpoint";
    }
    return "tail";
}

BoneRepresentative parse_representative(const std::string& name) {
    if (name == "tail") return BoneRepresentative::kTail;
    if (name == "head") return BoneRepresentative::kHead;
    if (name == "midpoint") return BoneRepresentative::kMidpoint;
    throw DataError("unknown bone representative \"" + name + "\"");
}

const char* bone_naming_name(BoneNaming n) {
    return n == BoneNaming::kHead ? "head" : "tail";
}

BoneNaming parse_bone_naming(const std::string& name) {
    if (name == "tail") return BoneNaming::kTail;
    if (name == "head") return BoneNaming::kHead;
    throw DataError("unknown bone naming \"" + name + "\"");
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw DataError("eval manifest: " + path + ": " + what);
}

std::string require_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    const std::string s = v.get<std::string>();
    if (s.empty()) fail(path, "expected a nonempty string");
    return s;
}

double require_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

long require_integer(const json& v, const std::string& path) {
    const double d = require_number(v, path);
    if (d != std::floor(d)) fail(path, "expected an integer");
    return static_cast<long>(d);
}

}  // namespace

EvalManifest read_eval_manifest(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("eval manifest: ") + e.what());
    }
    if (!root.is_object()) throw DataError("eval manifest: top level must be an object");
    if (!root.contains("format") || require_string(root["format"], "format") != "eval-manifest")
        throw DataError("eval manifest: format: expected \"eval-manifest\"");
    if (!root.contains("version") || require_number(root["version"], "version") != 1.0)
        throw DataError("eval manifest: version: unsupported version");

    EvalManifest manifest;
    if (root.contains("config")) {
        const json& c = root["config"];
        if (!c.is_object()) fail("config", "expected an object");
        if (c.contains("samples_per_bone"))
            manifest.config.b2b_samples =
                static_cast<int>(require_integer(c["samples_per_bone"], "config.samples_per_bone"));
        if (c.contains("n_points"))
            manifest.config.skin.n_points =
                static_cast<int>(require_integer(c["n_points"], "config.n_points"));
        if (c.contains("epsilon"))
            manifest.config.skin.epsilon = require_number(c["epsilon"], "config.epsilon");
        if (c.contains("seed"))
            manifest.config.skin.seed =
                static_cast<uint64_t>(require_integer(c["seed"], "config.seed"));
        if (c.contains("representative"))
            manifest.config.skin.representative =
                parse_representative(require_string(c["representative"], "config.representative"));
        if (c.contains("skin_names"))
            manifest.skin_names = parse_bone_naming(require_string(c["skin_names"], "config.skin_names"));
    }

    if (!root.contains("pairs")) throw DataError("eval manifest: missing field \"pairs\"");
    const json& pairs = root["pairs"];
    if (!pairs.is_array()) fail("pairs", "expected an array");
    std::set<std::string> ids;
    for (size_t i = 0; i < pairs.size(); ++i) {
        const std::string path = "pairs[" + std::to_string(i) + "]";
        const json& p = pairs[i];
        if (!p.is_object()) fail(path, "expected an object");
        EvalPair pair;
        if (!p.contains("id")) fail(path, "missing field \"id\"");
        pair.id = require_string(p["id"], path + ".id");
        if (!ids.insert(pair.id).second) fail(path + ".id", "duplicate id \"" + pair.id + "\"");
        if (!p.contains("pred")) fail(path, "missing field \"pred\"");
        pair.pred_path = require_string(p["pred"], path + ".pred");
        if (!p.contains("ref")) fail(path, "missing field \"ref\"");
        pair.ref_path = require_string(p["ref"], path + ".ref");
        manifest.pairs.push_back(std::move(pair));
    }
    return manifest;
}

std::string write_eval_manifest(const EvalManifest& manifest) {
    std::string out = "{\n";
    out += "  \"format\": \"eval-manifest\",\n";
    out += "  \"version\": 1,\n";
    out += "  \"config\": {\"samples_per_bone\": " + std::to_string(manifest.config.b2b_samples) +
           ", \"n_points\": " + std::to_string(manifest.config.skin.n_points) +
           ", \"epsilon\": " + g9(manifest.config.skin.epsilon) +
           ", \"seed\": " + std::to_string(manifest.config.skin.seed) +
           ", \"representative\": \"" + representative_name(manifest.config.skin.representative) +
           "\", \"skin_names\": \"" + bone_naming_name(manifest.skin_names) + "\"},\n";
    out += "  \"pairs\": [";
    for (size_t i = 0; i < manifest.pairs.size(); ++i) {
        const EvalPair& p = manifest.pairs[i];
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"id\": \"" + json_escape(p.id) + "\", \"pred\": \"" + json_escape(p.pred_path) +
               "\", \"ref\": \"" + json_escape(p.ref_path) + "\"}";
    }
    out += "\n  ]\n}\n";
    return out;
}

EvalManifest load_eval_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return read_eval_manifest(buffer.str());
}

void save_eval_manifest(const std::string& path, const EvalManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write \"" + path + "\"");
    out << write_eval_manifest(manifest);
}

}  // namespace rigkit
