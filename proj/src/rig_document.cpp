#include "rigkit/rig_document.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "rigkit/error.hpp"
#include "text_format.hpp"

namespace rigkit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw DataError("rig document: " + path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field \"" + key + "\"");
    return *it;
}

std::string require_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

double require_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

Vec3 require_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
    return {require_number(v[0], path + "[0]"), require_number(v[1], path + "[1]"),
            require_number(v[2], path + "[2]")};
}

}  // namespace

RigDocument read_rig_document(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("rig document: ") + e.what());
    }
    if (!root.is_object()) throw DataError("rig document: top level must be an object");

    if (require_string(require(root, "format", "$"), "format") != "rig-document")
        fail("format", "expected \"rig-document\"");
    const double version = require_number(require(root, "version", "$"), "version");
    if (version != 1.0) fail("version", "unsupported version");

    RigDocument doc;
    if (root.contains("id")) doc.id = require_string(root["id"], "id");
    if (root.contains("units")) doc.units = require_string(root["units"], "units");
    if (root.contains("mesh")) doc.mesh_path = require_string(root["mesh"], "mesh");
    if (root.contains("normalization")) {
        const json& n = root["normalization"];
        if (!n.is_object()) fail("normalization", "expected an object");
        NormalizationRecord record;
        record.scale = require_number(require(n, "scale", "normalization"), "normalization.scale");
        record.translation =
            require_vec3(require(n, "translation", "normalization"), "normalization.translation");
        doc.normalization = record;
    }

    const json& joints = require(root, "joints", "$");
    if (!joints.is_array() || joints.empty()) fail("joints", "expected a nonempty array");
    std::set<std::string> seen;
    for (size_t i = 0; i < joints.size(); ++i) {
        const std::string path = "joints[" + std::to_string(i) + "]";
        const json& j = joints[i];
        if (!j.is_object()) fail(path, "expected an object");
        DocumentJoint joint;
        joint.name = require_string(require(j, "name", path), path + ".name");
        if (joint.name.empty()) fail(path + ".name", "empty joint name");
        if (!seen.insert(joint.name).second)
            fail(path + ".name", "duplicate joint name \"" + joint.name + "\"");
        joint.position = require_vec3(require(j, "position", path), path + ".position");
        if (j.contains("parent") && !j["parent"].is_null())
            joint.parent = require_string(j["parent"], path + ".parent");
        doc.joints.push_back(std::move(joint));
    }
    for (size_t i = 0; i < doc.joints.size(); ++i) {
        const auto& parent = doc.joints[i].parent;
        if (parent && !seen.count(*parent))
            fail("joints[" + std::to_string(i) + "].parent",
                 "unknown parent \"" + *parent + "\"");
    }

    if (root.contains("skin")) {
        const json& skin = root["skin"];
        if (!skin.is_array()) fail("skin", "expected an array");
        std::set<int> vertices;
        for (size_t i = 0; i < skin.size(); ++i) {
            const std::string path = "skin[" + std::to_string(i) + "]";
            const json& row = skin[i];
            if (!row.is_object()) fail(path, "expected an object");
            DocumentSkinRow out;
            const double vertex = require_number(require(row, "vertex", path), path + ".vertex");
            if (vertex < 0 || vertex != static_cast<double>(static_cast<int>(vertex)))
                fail(path + ".vertex", "expected a nonnegative integer");
            out.vertex = static_cast<int>(vertex);
            if (!vertices.insert(out.vertex).second)
                fail(path + ".vertex", "duplicate skin row for vertex " + std::to_string(out.vertex));
            const json& weights = require(row, "weights", path);
            if (!weights.is_object()) fail(path + ".weights", "expected an object");
            for (const auto& [name, value] : weights.items()) {
                if (!seen.count(name))
                    fail(path + ".weights", "unknown bone name \"" + name + "\"");
                const double w = require_number(value, path + ".weights." + name);
                if (w < 0.0) fail(path + ".weights." + name, "negative weight");
                out.weights[name] = w;
            }
            doc.skin.push_back(std::move(out));
        }
    }
    return doc;
}

std::string write_rig_document(const RigDocument& doc) {
    std::string out = "{\n";
    out += "  \"format\": \"rig-document\",\n";
    out += "  \"version\": 1,\n";
    if (!doc.id.empty()) out += "  \"id\": \"" + json_escape(doc.id) + "\",\n";
    if (!doc.units.empty()) out += "  \"units\": \"" + json_escape(doc.units) + "\",\n";
    if (doc.normalization) {
        out += "  \"normalization\": {\"scale\": " + g9(doc.normalization->scale) +
               ", \"translation\": [" + g9(doc.normalization->translation.x) + ", " +
               g9(doc.normalization->translation.y) + ", " + g9(doc.normalization->translation.z) +
               "]},\n";
    }
    if (!doc.mesh_path.empty()) out += "  \"mesh\": \"" + json_escape(doc.mesh_path) + "\",\n";

    out += "  \"joints\": [";
    for (size_t i = 0; i < doc.joints.size(); ++i) {
        const DocumentJoint& j = doc.joints[i];
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"name\": \"" + json_escape(j.name) + "\", \"position\": [" +
               g9(j.position.x) + ", " + g9(j.position.y) + ", " + g9(j.position.z) +
               "], \"parent\": ";
        out += j.parent ? "\"" + json_escape(*j.parent) + "\"" : std::string("null");
        out += "}";
    }
    out += "\n  ]";

    if (!doc.skin.empty()) {
        std::vector<const DocumentSkinRow*> rows;
        for (const auto& row : doc.skin) rows.push_back(&row);
        std::sort(rows.begin(), rows.end(),
                  [](const DocumentSkinRow* a, const DocumentSkinRow* b) { return a->vertex < b->vertex; });
        out += ",\n  \"skin\": [";
        for (size_t i = 0; i < rows.size(); ++i) {
            out += i == 0 ? "\n" : ",\n";
            out += "    {\"vertex\": " + std::to_string(rows[i]->vertex) + ", \"weights\": {";
            bool first = true;
            for (const auto& [name, w] : rows[i]->weights) {
                if (!first) out += ", ";
                first = false;
                out += "\"" + json_escape(name) + "\": " + g9(w);
            }
            out += "}}";
        }
        out += "\n  ]";
    }
    out += "\n}\n";
    return out;
}

RigDocument load_rig_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return read_rig_document(buffer.str());
}

void save_rig_document(const std::string& path, const RigDocument& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write \"" + path + "\"");
    out << write_rig_document(doc);
}

Skeleton document_skeleton_raw(const RigDocument& doc) {
    std::map<std::string, int> index;
    for (size_t i = 0; i < doc.joints.size(); ++i)
        index[doc.joints[i].name] = static_cast<int>(i);
    Skeleton skeleton;
    for (const DocumentJoint& j : doc.joints) {
        Joint joint;
        joint.name = j.name;
        joint.position = j.position;
        if (j.parent) {
            const auto it = index.find(*j.parent);
            if (it == index.end())
                throw DataError("rig document: unknown parent \"" + *j.parent + "\"");
            joint.parent = it->second;
        }
        skeleton.joints.push_back(std::move(joint));
    }
    return skeleton;
}

Skeleton document_skeleton(const RigDocument& doc) {
    Skeleton skeleton = document_skeleton_raw(doc);
    skeleton.root();  // validates tree shape
    return skeleton;
}

std::map<std::string, int> bone_name_index(const Skeleton& skeleton, BoneNaming naming) {
    const auto bones = skeleton.bones();
    std::map<std::string, int> index;
    if (naming == BoneNaming::kTail) {
        for (size_t b = 0; b < bones.size(); ++b) {
            const std::string& name = skeleton.joints[static_cast<size_t>(bones[b].tail_joint)].name;
            if (!index.emplace(name, static_cast<int>(b)).second)
                throw DataError("duplicate joint name \"" + name + "\"");
        }
        return index;
    }
    // Head naming: a head with several children cannot name one bone.
    std::map<int, int> bones_per_head;
    for (const Bone& b : bones) bones_per_head[b.head_joint] += 1;
    for (size_t b = 0; b < bones.size(); ++b) {
        if (bones_per_head[bones[b].head_joint] > 1)
            throw DataError("head-joint bone naming is ambiguous at joint \"" +
                            skeleton.joints[static_cast<size_t>(bones[b].head_joint)].name + "\"");
        const std::string& name = skeleton.joints[static_cast<size_t>(bones[b].head_joint)].name;
        if (!index.emplace(name, static_cast<int>(b)).second)
            throw DataError("duplicate joint name \"" + name + "\"");
    }
    return index;
}

RiggedAsset assemble_asset(const RigDocument& doc, Mesh mesh, BoneNaming naming) {
    RiggedAsset asset;
    asset.id = doc.id;
    asset.skeleton = document_skeleton(doc);
    asset.mesh = std::move(mesh);

    const auto bone_index = bone_name_index(asset.skeleton, naming);
    const int n_bones = static_cast<int>(asset.skeleton.bones().size());
    const int n_vertices = static_cast<int>(asset.mesh.vertices.size());
    SkinningMatrix skin(n_vertices, n_bones);
    for (const DocumentSkinRow& row : doc.skin) {
        if (row.vertex < 0 || row.vertex >= n_vertices)
            throw DataError("rig document: skin vertex " + std::to_string(row.vertex) +
                            " out of range");
        for (const auto& [name, w] : row.weights) {
            const auto it = bone_index.find(name);
            if (it == bone_index.end())
                throw DataError("rig document: weight references \"" + name +
                                "\" which names no bone");
            skin.weights.at(row.vertex, it->second) = w;
        }
    }
    asset.skinning = renormalize_skinning(skin);
    return asset;
}

RigDocument document_from_asset(const RiggedAsset& asset, BoneNaming naming) {
    RigDocument doc;
    doc.id = asset.id;
    std::set<std::string> seen;
    for (const Joint& j : asset.skeleton.joints) {
        if (j.name.empty()) throw DataError("document export needs named joints");
        if (!seen.insert(j.name).second)
            throw DataError("duplicate joint name \"" + j.name + "\"");
        DocumentJoint out;
        out.name = j.name;
        out.position = j.position;
        if (j.parent) out.parent = asset.skeleton.joints[static_cast<size_t>(*j.parent)].name;
        doc.joints.push_back(std::move(out));
    }

    if (asset.skinning.vertex_count() > 0 && asset.skinning.bone_count() > 0) {
        const auto bones = asset.skeleton.bones();
        if (static_cast<int>(bones.size()) != asset.skinning.bone_count())
            throw DataError("skinning column count differs from bone count");
        std::vector<std::string> bone_names(bones.size());
        for (const auto& [name, b] : bone_name_index(asset.skeleton, naming))
            bone_names[static_cast<size_t>(b)] = name;
        for (int v = 0; v < asset.skinning.vertex_count(); ++v) {
            DocumentSkinRow row;
            row.vertex = v;
            for (int b = 0; b < asset.skinning.bone_count(); ++b) {
                const double w = asset.skinning.weights.at(v, b);
                if (w > 0.0) row.weights[bone_names[static_cast<size_t>(b)]] = w;
            }
            doc.skin.push_back(std::move(row));
        }
    }
    return doc;
}

}  // namespace rigkit
