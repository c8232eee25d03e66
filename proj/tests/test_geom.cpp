#include <cmath>

#include "doctest.h"
#include "rigkit/geom.hpp"
#include "rigkit/numeric.hpp"

using namespace rigkit;

namespace {

bool near(const Vec3& a, const Vec3& b, double tol = 1e-12) {
    return (a - b).norm() <= tol;
}

}  // namespace

TEST_CASE("quaternion rotation: 90 degrees about z maps x to y") {
    const Quat q = Quat::axis_angle({0, 0, 1}, 3.14159265358979323846 / 2.0);
    CHECK(near(q.to_matrix() * Vec3{1, 0, 0}, {0, 1, 0}, 1e-12));
    CHECK(near(q.to_matrix() * Vec3{0, 1, 0}, {-1, 0, 0}, 1e-12));
    CHECK(q.to_matrix().det() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rotation matrices from random unit quaternions are orthonormal") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Quat q = Quat{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1)}
                           .normalized();
        const Mat3 r = q.to_matrix();
        const Mat3 rtr = r.transposed() * r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(rtr.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        CHECK(r.det() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rigid transform compose and inverse round trip") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const RigidTransform t{
            Quat{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}
                .normalized()
                .to_matrix(),
            {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}};
        const Vec3 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        CHECK(near(t.inverse().apply(t.apply(p)), p, 1e-12));
        CHECK(near(t.compose(t.inverse()).apply(p), p, 1e-12));
    }
}

TEST_CASE("aabb point distance handles inside, face and corner cases") {
    Aabb box;
    box.expand({0, 0, 0});
    box.expand({1, 1, 1});
    CHECK(box.distance2({0.5, 0.5, 0.5}) == 0.0);
    CHECK(box.distance2({2, 0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(box.distance2({2, 2, 2}) == doctest::Approx(3.0));
    CHECK(box.center() == Vec3{0.5, 0.5, 0.5});
    CHECK(box.extent() == Vec3{1, 1, 1});

    Aabb empty;
    CHECK(empty.empty());
    CHECK(empty.extent() == Vec3{});
}
