#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rigkit/rig.hpp"

namespace rigkit {

struct DocumentJoint {
    std::string name;
    Vec3 position;
    std::optional<std::string> parent;  // empty for the root
};

struct DocumentSkinRow {
    int vertex = 0;
    // Bone name -> weight; bones are named by a joint per BoneNaming.
    std::map<std::string, double> weights;
};

// Interchange document for a rig: joints with named parents, optional
// sparse skin rows, an optional mesh reference, and metadata.
struct RigDocument {
    std::string id;
    std::string units;
    std::string mesh_path;
    std::optional<NormalizationRecord> normalization;
    std::vector<DocumentJoint> joints;
    std::vector<DocumentSkinRow> skin;
};

// Which joint a bone borrows its name from in documents and rig files.
// Tail naming is total (every non-root joint caps exactly one bone);
// head naming only resolves joints with a single child.
enum class BoneNaming {
    kTail,
    kHead,
};

RigDocument read_rig_document(const std::string& text);

// Canonical serialization: fixed key order, sorted weight keys, %.9g
// floats.  write(read(write(x))) is byte-identical to write(x).
std::string write_rig_document(const RigDocument& doc);

RigDocument load_rig_document(const std::string& path);
void save_rig_document(const std::string& path, const RigDocument& doc);

// Skeleton from the document's joint section (validates the tree).
Skeleton document_skeleton(const RigDocument& doc);

// Same, but without the tree-shape check, so diagnostic tools can run
// validate_skeleton on whatever structure the document declares.
Skeleton document_skeleton_raw(const RigDocument& doc);

// Joins a document with its mesh into a dense asset.  Sparse skin rows
// densify into a row-stochastic matrix (missing vertices get uniform
// rows via renormalization).
RiggedAsset assemble_asset(const RigDocument& doc, Mesh mesh, BoneNaming naming = BoneNaming::kTail);

RigDocument document_from_asset(const RiggedAsset& asset, BoneNaming naming = BoneNaming::kTail);

// Bone column index for each bone name under the given convention.
std::map<std::string, int> bone_name_index(const Skeleton& skeleton, BoneNaming naming);

}  // namespace rigkit
