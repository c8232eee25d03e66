#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rigkit/geom.hpp"
#include "rigkit/matrix.hpp"

namespace rigkit {

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    // Optional; when present there is one unit normal per vertex.
    std::vector<Vec3> normals;
};

struct Joint {
    Vec3 position;
    // Index of the parent joint; empty for the root.
    std::optional<int> parent;
    std::string name;
};

// A bone spans from its head joint (the parent end) to its tail joint
// (the child end).  Every non-root joint is the tail of exactly one bone.
struct Bone {
    int head_joint = 0;
    int tail_joint = 0;
};

struct Skeleton {
    std::vector<Joint> joints;

    int joint_count() const { return static_cast<int>(joints.size()); }

    // Index of the unique parentless joint.  Throws DataError if the
    // joint list does not form a single rooted tree.
    int root() const;

    // Bones ordered by tail joint index.
    std::vector<Bone> bones() const;

    Vec3 head_of(const Bone& b) const { return joints[static_cast<size_t>(b.head_joint)].position; }
    Vec3 tail_of(const Bone& b) const { return joints[static_cast<size_t>(b.tail_joint)].position; }
};

// Depth of every joint (root = 0).  Validates tree shape on the way.
std::vector<int> joint_depths(const Skeleton& skeleton);

// Row-stochastic vertex/bone weight matrix: rows = vertices, cols = bones.
struct SkinningMatrix {
    Matrix weights;

    SkinningMatrix() = default;
    SkinningMatrix(int vertices, int bones) : weights(vertices, bones) {}

    int vertex_count() const { return weights.rows; }
    int bone_count() const { return weights.cols; }
};

struct RiggedAsset {
    std::string id;
    Mesh mesh;
    Skeleton skeleton;
    SkinningMatrix skinning;
};

// Scale and translation applied to produce a normalized asset:
// p' = p * scale + translation.
struct NormalizationRecord {
    double scale = 1.0;
    Vec3 translation;

    Vec3 apply(const Vec3& p) const { return p * scale + translation; }
};

struct Violation {
    // Stable machine-readable code, e.g. "row-sum" or "multiple-roots".
    std::string code;
    // Offending element index where meaningful, -1 otherwise.
    long index = -1;
    std::string detail;
};

using ValidationReport = std::vector<Violation>;

// Checks every structural invariant of the asset: mesh index ranges and
// degeneracy, skeleton tree shape, skinning shape, non-negativity and
// row sums (tolerance 1e-6).  An empty report means the asset is valid.
ValidationReport validate_asset(const RiggedAsset& asset);

ValidationReport validate_mesh(const Mesh& mesh);
ValidationReport validate_skeleton(const Skeleton& skeleton);

// Isotropic rescale of mesh and joints into the unit cube: the longest
// axis of their joint bounding box spans exactly 1 and the box center
// lands on (0.5, 0.5, 0.5).  Throws DataError on zero extent.
std::pair<RiggedAsset, NormalizationRecord> normalize_unit_box(const RiggedAsset& asset);

// Divides each row by (row sum + epsilon); rows that are entirely zero
// become uniform.  Negative weights are a DataError.
SkinningMatrix renormalize_skinning(const SkinningMatrix& skinning, double epsilon = 1e-8);

}  // namespace rigkit
