#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "rigkit/error.hpp"
#include "rigkit/rig.hpp"

using namespace rigkit;

namespace {

bool has_code(const ValidationReport& report, const std::string& code) {
    return std::any_of(report.begin(), report.end(),
                       [&](const Violation& v) { return v.code == code; });
}

RiggedAsset capsule_asset() {
    RiggedAsset asset;
    asset.mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}};
    asset.mesh.faces = {{0, 1, 2}};
    asset.skeleton.joints.resize(2);
    asset.skeleton.joints[0].position = {0, 0, 0};
    asset.skeleton.joints[1].position = {1, 0, 0};
    asset.skeleton.joints[1].parent = 0;
    asset.skinning = SkinningMatrix(3, 1);
    for (int v = 0; v < 3; ++v) asset.skinning.weights.at(v, 0) = 1.0;
    return asset;
}

}  // namespace

TEST_CASE("skeleton root and bones on a simple chain") {
    Skeleton s;
    s.joints.resize(3);
    s.joints[1].parent = 0;
    s.joints[2].parent = 1;
    CHECK(s.root() == 0);
    const auto bones = s.bones();
    REQUIRE(bones.size() == 2);
    CHECK(bones[0].head_joint == 0);
    CHECK(bones[0].tail_joint == 1);
    CHECK(bones[1].head_joint == 1);
    CHECK(bones[1].tail_joint == 2);

    const auto depth = joint_depths(s);
    CHECK(depth == std::vector<int>{0, 1, 2});
}

TEST_CASE("skeleton validation rejects forests, cycles and orphan loops") {
    Skeleton two_roots;
    two_roots.joints.resize(2);
    CHECK_THROWS_AS(two_roots.root(), DataError);
    CHECK(has_code(validate_skeleton(two_roots), "multiple-roots"));

    Skeleton no_root;
    no_root.joints.resize(2);
    no_root.joints[0].parent = 1;
    no_root.joints[1].parent = 0;
    CHECK(has_code(validate_skeleton(no_root), "no-root"));

    // A root exists but joints 1 and 2 form a loop hanging off nothing.
    Skeleton loop;
    loop.joints.resize(3);
    loop.joints[1].parent = 2;
    loop.joints[2].parent = 1;
    CHECK_THROWS_AS(joint_depths(loop), DataError);
    CHECK(has_code(validate_skeleton(loop), "parent-cycle"));

    Skeleton bad_index;
    bad_index.joints.resize(2);
    bad_index.joints[1].parent = 5;
    CHECK(has_code(validate_skeleton(bad_index), "parent-range"));
}

TEST_CASE("validate_asset accepts a well-formed capsule and names violations") {
    RiggedAsset asset = capsule_asset();
    CHECK(validate_asset(asset).empty());

    asset.skinning.weights.at(1, 0) = 0.8;
    CHECK(has_code(validate_asset(asset), "row-sum"));

    asset = capsule_asset();
    asset.skinning.weights.at(0, 0) = -0.5;
    CHECK(has_code(validate_asset(asset), "negative-weight"));

    asset = capsule_asset();
    asset.mesh.faces.push_back({0, 0, 1});
    CHECK(has_code(validate_asset(asset), "degenerate-face"));

    asset = capsule_asset();
    asset.mesh.faces.push_back({0, 1, 9});
    CHECK(has_code(validate_asset(asset), "face-index"));
}

TEST_CASE("normalize_unit_box: cube spanning [-2,2] gets scale 0.25") {
    RiggedAsset asset;
    for (int i = 0; i < 8; ++i)
        asset.mesh.vertices.push_back(
            {i & 1 ? 2.0 : -2.0, i & 2 ? 2.0 : -2.0, i & 4 ? 2.0 : -2.0});
    asset.skeleton.joints.resize(1);
    asset.skeleton.joints[0].position = {0, 0, 0};

    const auto [normalized, record] = normalize_unit_box(asset);
    CHECK(record.scale == doctest::Approx(0.25).epsilon(1e-12));
    for (const Vec3& v : normalized.mesh.vertices) {
        for (int a = 0; a < 3; ++a) {
            CHECK(v[a] >= -1e-12);
            CHECK(v[a] <= 1.0 + 1e-12);
        }
    }
    CHECK((normalized.skeleton.joints[0].position - Vec3{0.5, 0.5, 0.5}).norm() < 1e-12);
}

TEST_CASE("normalize_unit_box: already-normalized asset gets the identity record") {
    RiggedAsset asset;
    asset.mesh.vertices = {{0, 0, 0}, {1, 1, 1}};
    asset.skeleton.joints.resize(1);
    asset.skeleton.joints[0].position = {0.5, 0.5, 0.5};
    const auto [normalized, record] = normalize_unit_box(asset);
    CHECK(record.scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(record.translation.norm() < 1e-12);
}

TEST_CASE("normalize_unit_box: long segment skeleton lands on the box faces") {
    RiggedAsset asset;
    asset.mesh.vertices = {{0, 0, 5}};
    asset.skeleton.joints.resize(2);
    asset.skeleton.joints[0].position = {0, 0, 0};
    asset.skeleton.joints[1].position = {0, 0, 10};
    asset.skeleton.joints[1].parent = 0;

    const auto [normalized, record] = normalize_unit_box(asset);
    CHECK(record.scale == doctest::Approx(0.1).epsilon(1e-12));
    CHECK((normalized.skeleton.joints[0].position - Vec3{0.5, 0.5, 0.0}).norm() < 1e-12);
    CHECK((normalized.skeleton.joints[1].position - Vec3{0.5, 0.5, 1.0}).norm() < 1e-12);
}

TEST_CASE("normalize_unit_box is idempotent and isotropic") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        RiggedAsset asset;
        asset.skeleton = testgen::random_skeleton(rng, 3, 12);
        for (Joint& j : asset.skeleton.joints) j.position = j.position * 7.0 - Vec3{3, 1, 2};
        for (int v = 0; v < 5; ++v)
            asset.mesh.vertices.push_back(
                {rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)});

        const auto [once, record] = normalize_unit_box(asset);
        const auto [twice, second] = normalize_unit_box(once);
        CHECK(second.scale == doctest::Approx(1.0).epsilon(1e-9));
        for (size_t j = 0; j < once.skeleton.joints.size(); ++j)
            CHECK((once.skeleton.joints[j].position - twice.skeleton.joints[j].position).norm() <
                  1e-9);

        // Isotropy: distance ratios are preserved.
        const Vec3 a = asset.skeleton.joints[0].position;
        const Vec3 b = asset.skeleton.joints[1].position;
        const Vec3 na = once.skeleton.joints[0].position;
        const Vec3 nb = once.skeleton.joints[1].position;
        CHECK((na - nb).norm() == doctest::Approx((a - b).norm() * record.scale).epsilon(1e-9));
    }
}

TEST_CASE("normalize_unit_box rejects degenerate geometry") {
    RiggedAsset empty;
    CHECK_THROWS_AS(normalize_unit_box(empty), DataError);

    RiggedAsset point;
    point.mesh.vertices = {{1, 1, 1}, {1, 1, 1}};
    CHECK_THROWS_AS(normalize_unit_box(point), DataError);
}

TEST_CASE("renormalize_skinning handles hand-worked rows") {
    SkinningMatrix w(3, 2);
    w.weights.at(0, 0) = 0.2;
    w.weights.at(0, 1) = 0.2;
    w.weights.at(1, 0) = 1.0;
    w.weights.at(1, 1) = 3.0;
    // row 2 stays all zero
    const SkinningMatrix r = renormalize_skinning(w);
    CHECK(r.weights.at(0, 0) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.weights.at(1, 0) == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(r.weights.at(1, 1) == doctest::Approx(0.75).epsilon(1e-8));
    CHECK(r.weights.at(2, 0) == 0.5);
    CHECK(r.weights.at(2, 1) == 0.5);

    SkinningMatrix four(1, 4);
    const SkinningMatrix u = renormalize_skinning(four);
    for (int c = 0; c < 4; ++c) CHECK(u.weights.at(0, c) == 0.25);

    SkinningMatrix negative(1, 2);
    negative.weights.at(0, 0) = -0.1;
    CHECK_THROWS_WITH_AS(renormalize_skinning(negative), "renormalize: negative weight", DataError);
}

TEST_CASE("renormalized rows satisfy the row-stochastic invariant") {
    Rng rng(22);
    SkinningMatrix w(50, 7);
    for (double& x : w.weights.data) x = rng.next_below(4) == 0 ? 0.0 : rng.uniform(0.0, 3.0);
    const SkinningMatrix r = renormalize_skinning(w);
    for (int row = 0; row < r.weights.rows; ++row) {
        double sum = 0.0;
        for (int c = 0; c < r.weights.cols; ++c) {
            CHECK(r.weights.at(row, c) >= 0.0);
            sum += r.weights.at(row, c);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}
