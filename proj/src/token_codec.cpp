#include "rigkit/token_codec.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "rigkit/error.hpp"

namespace rigkit {

QuantizedPoint quantize(const Vec3& p, int resolution) {
    if (resolution <= 0) throw DataError("quantize: resolution must be positive");
    if (!p.finite()) throw DataError("quantize: non-finite coordinate");
    QuantizedPoint q;
    int* out[3] = {&q.qx, &q.qy, &q.qz};
    for (int a = 0; a < 3; ++a) {
        double scaled = std::floor(p[a] * resolution);
        if (scaled < 0.0) {
            *out[a] = 0;
            q.clamped = true;
        } else if (scaled > resolution - 1) {
            *out[a] = resolution - 1;
            // x == 1.0 lands exactly on the upper edge and belongs to the
            // last cell; only flag genuine overshoot.
            if (p[a] > 1.0) q.clamped = true;
        } else {
            *out[a] = static_cast<int>(scaled);
        }
    }
    return q;
}

Vec3 dequantize(int qx, int qy, int qz, int resolution) {
    if (resolution <= 0) throw DataError("dequantize: resolution must be positive");
    auto center = [resolution](int q) { return (q + 0.5) / resolution; };
    return {center(qx), center(qy), center(qz)};
}

BfsResult bfs_order(const Skeleton& skeleton) {
    const int n = skeleton.joint_count();
    std::vector<int> depth = joint_depths(skeleton);  // validates tree shape
    int max_depth = *std::max_element(depth.begin(), depth.end());

    std::vector<std::vector<int>> levels(static_cast<size_t>(max_depth) + 1);
    for (int i = 0; i < n; ++i) levels[static_cast<size_t>(depth[static_cast<size_t>(i)])].push_back(i);

    std::vector<int> perm(static_cast<size_t>(n), -1);
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));

    for (auto& level : levels) {
        std::sort(level.begin(), level.end(), [&](int a, int b) {
            const Vec3& pa = skeleton.joints[static_cast<size_t>(a)].position;
            const Vec3& pb = skeleton.joints[static_cast<size_t>(b)].position;
            QuantizedPoint qa = quantize(pa);
            QuantizedPoint qb = quantize(pb);
            // Parents live on earlier levels, so their new indices are
            // already assigned by the time a level is sorted.
            auto parent_rank = [&](int j) {
                const auto& p = skeleton.joints[static_cast<size_t>(j)].parent;
                return p ? perm[static_cast<size_t>(*p)] : -1;
            };
            auto key = [&](int j, const QuantizedPoint& q, const Vec3& p) {
                return std::make_tuple(q.qz, q.qy, q.qx, p.z, p.y, p.x, parent_rank(j), j);
            };
            return key(a, qa, pa) < key(b, qb, pb);
        });
        for (int j : level) {
            perm[static_cast<size_t>(j)] = static_cast<int>(order.size());
            order.push_back(j);
        }
    }

    BfsResult out;
    out.permutation = perm;
    out.skeleton.joints.resize(static_cast<size_t>(n));
    for (int new_idx = 0; new_idx < n; ++new_idx) {
        Joint j = skeleton.joints[static_cast<size_t>(order[static_cast<size_t>(new_idx)])];
        if (j.parent) j.parent = perm[static_cast<size_t>(*j.parent)];
        out.skeleton.joints[static_cast<size_t>(new_idx)] = std::move(j);
    }
    return out;
}

TokenSequence tokenize(const Skeleton& skeleton, const CodecConfig& config) {
    if (skeleton.joint_count() > config.max_joints)
        throw DataError("tokenize: sequence overflow (" + std::to_string(skeleton.joint_count()) +
                        " joints, limit " + std::to_string(config.max_joints) + ")");
    BfsResult bfs = bfs_order(skeleton);

    TokenSequence seq;
    seq.tokens.reserve(bfs.skeleton.joints.size());
    for (size_t k = 0; k < bfs.skeleton.joints.size(); ++k) {
        const Joint& j = bfs.skeleton.joints[k];
        QuantizedPoint q = quantize(j.position, config.grid_resolution);
        SkeletonToken tok{q.qx, q.qy, q.qz, j.parent ? *j.parent : 0};
        seq.tokens.push_back(tok);
    }
    return seq;
}

Skeleton detokenize(const TokenSequence& sequence, const CodecConfig& config) {
    const int n = static_cast<int>(sequence.tokens.size());
    if (n == 0) throw DataError("detokenize: empty sequence");
    if (n > config.max_joints)
        throw DataError("detokenize: sequence overflow (" + std::to_string(n) + " tokens, limit " +
                        std::to_string(config.max_joints) + ")");

    Skeleton skeleton;
    skeleton.joints.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        const SkeletonToken& t = sequence.tokens[static_cast<size_t>(k)];
        for (int q : {t.qx, t.qy, t.qz}) {
            if (q < 0 || q >= config.grid_resolution)
                throw DataError("detokenize: cell index out of range at token " + std::to_string(k));
        }
        if (k == 0) {
            if (t.parent != 0) throw DataError("detokenize: root token must reference itself");
        } else if (t.parent < 0 || t.parent >= k) {
            throw DataError("detokenize: forward parent reference at token " + std::to_string(k));
        }
        Joint& j = skeleton.joints[static_cast<size_t>(k)];
        j.position = dequantize(t.qx, t.qy, t.qz, config.grid_resolution);
        if (k > 0) j.parent = t.parent;
        j.name = "j" + std::to_string(k);
    }
    return skeleton;
}

std::vector<bool> parent_mask(int k, int length) {
    if (k < 0) throw DataError("parent_mask: negative position");
    if (length <= k) throw DataError("parent_mask: length must exceed position");
    std::vector<bool> mask(static_cast<size_t>(length), false);
    if (k == 0) {
        mask[0] = true;
    } else {
        for (int i = 0; i < k; ++i) mask[static_cast<size_t>(i)] = true;
    }
    return mask;
}

}  // namespace rigkit
