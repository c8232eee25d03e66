#pragma once

#include <vector>

#include "rigkit/rig.hpp"

namespace rigkit {

// One skeleton joint as a discrete token: quantized grid cell plus the
// sequence index of the parent.  The root points at itself (index 0).
struct SkeletonToken {
    int qx = 0;
    int qy = 0;
    int qz = 0;
    int parent = 0;

    bool operator==(const SkeletonToken&) const = default;
};

struct TokenSequence {
    std::vector<SkeletonToken> tokens;
    // Whether the sequence was closed by an end marker.  Framing only;
    // any prefix that forms a valid tree decodes.
    bool terminated = true;
};

struct CodecConfig {
    int grid_resolution = 128;
    int max_joints = 256;
};

struct QuantizedPoint {
    int qx = 0;
    int qy = 0;
    int qz = 0;
    // True when any coordinate fell outside [0, 1] and was clamped.
    bool clamped = false;
};

// floor(x * resolution), clamped to [0, resolution - 1].  Non-finite
// coordinates are a DataError.
QuantizedPoint quantize(const Vec3& p, int resolution = 128);

// Center of the quantized cell.
Vec3 dequantize(int qx, int qy, int qz, int resolution = 128);

struct BfsResult {
    Skeleton skeleton;
    // permutation[old index] = new index.
    std::vector<int> permutation;
};

// Canonical breadth-first joint order: root first, then each depth level
// sorted ascending by quantized (z, y, x).  Exact key collisions fall
// back to the continuous coordinates, then the parent's new index, then
// the original index, so the order does not depend on how the joints
// happened to be stored.
BfsResult bfs_order(const Skeleton& skeleton);

// Sequence of (cell, parent) tokens in canonical order.  Inputs are
// expected normalized to the unit cube; out-of-range positions clamp.
TokenSequence tokenize(const Skeleton& skeleton, const CodecConfig& config = {});

// Rebuilds a skeleton with joints at cell centers.  Joints are named
// j0, j1, ... in sequence order.
Skeleton detokenize(const TokenSequence& sequence, const CodecConfig& config = {});

// Mask over candidate parent positions for the token at position k:
// {0} for the root slot, {0 .. k-1} afterwards.
std::vector<bool> parent_mask(int k, int length);

}  // namespace rigkit
