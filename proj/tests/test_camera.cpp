#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "featnav/camera.hpp"

using namespace featnav;

namespace {

CameraRig default_rig() {
    CameraRig rig;
    rig.validate();
    return rig;
}

}  // namespace

TEST_CASE("rig validation") {
    CHECK_NOTHROW(default_rig().validate());

    Intrinsics bad;
    bad.fx = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    Intrinsics off_center;
    off_center.cx = 900.0;
    CHECK_THROWS_AS(off_center.validate(), std::invalid_argument);

    BodyToImage skew;
    skew.rotation[0][1] = 0.3;
    CHECK_THROWS_AS(skew.validate(), std::invalid_argument);

    BodyToImage mirror;  // orthonormal but det = -1
    mirror.rotation = {{{1, 0, 0}, {0, 1, 0}, {0, 0, -1}}};
    CHECK_THROWS_AS(mirror.validate(), std::invalid_argument);
}

TEST_CASE("project_direction maps planar body velocities to image directions") {
    const CameraRig rig = default_rig();

    SUBCASE("forward body motion is the +u axis") {
        const PixelVec d = project_direction(rig, {1.0, 0.0});
        CHECK(d.u > 0.0);
        CHECK(d.v == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("scaling the velocity leaves the direction unchanged") {
        const PixelVec a = project_direction(rig, {0.3, -0.4});
        const PixelVec b = project_direction(rig, {3.0, -4.0});
        const double cross = a.u * b.v - a.v * b.u;
        CHECK(std::abs(cross) < 1e-9);
        CHECK(dot(a, b) > 0.0);
    }
    SUBCASE("a yawed camera rotates the direction: body x to image -v") {
        CameraRig yawed = rig;
        yawed.extrinsics = BodyToImage::yawed(-kPi / 2.0);
        const PixelVec d = project_direction(yawed, {1.0, 0.0});
        const double n = norm(d);
        CHECK(d.u / n == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(d.v / n == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("translation never matters") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int i = 0; i < 200; ++i) {
            CameraRig shifted = rig;
            shifted.extrinsics.translation = {u(rng), u(rng), u(rng)};
            const BodyVelocity v{u(rng), u(rng)};
            if (norm(v) < 1e-6) continue;
            const PixelVec a = project_direction(rig, v);
            const PixelVec b = project_direction(shifted, v);
            CHECK(a.u == b.u);
            CHECK(a.v == b.v);
        }
    }
    SUBCASE("zero velocity rejected") {
        CHECK_THROWS_AS(project_direction(rig, {0.0, 0.0}), std::invalid_argument);
    }
}

TEST_CASE("lift_direction inverts the planar direction map") {
    SUBCASE("round trip is parallel for random yawed rigs") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> yaw(0.0, 2.0 * kPi);
        for (int i = 0; i < 500; ++i) {
            CameraRig rig = default_rig();
            rig.extrinsics = BodyToImage::yawed(yaw(rng));
            const BodyVelocity v{u(rng), u(rng)};
            if (norm(v) < 1e-3) continue;
            const BodyVelocity back = lift_direction(rig, project_direction(rig, v));
            const double cross = v.vx * back.vy - v.vy * back.vx;
            CHECK(std::abs(cross) / norm(v) < 1e-9);
            CHECK(v.vx * back.vx + v.vy * back.vy > 0.0);
        }
    }
    SUBCASE("zero image direction rejected") {
        CHECK_THROWS_AS(lift_direction(default_rig(), {0.0, 0.0}), std::invalid_argument);
    }
    SUBCASE("solves the 2x2 direction system") {
        CameraRig rig = default_rig();
        rig.extrinsics = BodyToImage::yawed(-kPi / 2.0);  // body x -> image -v
        const BodyVelocity v = lift_direction(rig, {0.0, -1.0});
        CHECK(v.vx == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.vy == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("project_point applies the pinhole model to ground points") {
    const CameraRig rig = default_rig();
    const VehiclePose pose{{2.0, 3.0}, 1.5};

    SUBCASE("a point directly under the camera lands on the optical center") {
        const auto p = project_point(rig, {2.0, 3.0}, pose);
        REQUIRE(p.has_value());
        CHECK(p->u == doctest::Approx(rig.intrinsics.cx).epsilon(1e-12));
        CHECK(p->v == doctest::Approx(rig.intrinsics.cy).epsilon(1e-12));
    }
    SUBCASE("lateral offset follows similar triangles") {
        const auto p = project_point(rig, {2.3, 3.0}, pose);
        REQUIRE(p.has_value());
        CHECK(p->u == doctest::Approx(rig.intrinsics.cx + rig.intrinsics.fx * 0.3 / 1.5)
                          .epsilon(1e-12));
    }
    SUBCASE("points outside the frustum are not detected") {
        CHECK_FALSE(project_point(rig, {9.0, 3.0}, pose).has_value());
        CHECK_FALSE(project_point(rig, {2.0, 5.0}, pose).has_value());
    }
    SUBCASE("points behind the camera are not detected") {
        const VehiclePose upside_down{{2.0, 3.0}, -1.0};
        CHECK_FALSE(project_point(rig, {2.0, 3.0}, upside_down).has_value());
    }
    SUBCASE("ground-ray inverse reproduces the world point") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> u(-0.6, 0.6);
        for (int i = 0; i < 200; ++i) {
            const Vec2 w{2.0 + u(rng), 3.0 + u(rng)};
            const auto p = project_point(rig, w, pose);
            REQUIRE(p.has_value());
            const Vec2 back{pose.position.x + (p->u - rig.intrinsics.cx) * pose.height / rig.intrinsics.fx,
                            pose.position.y + (p->v - rig.intrinsics.cy) * pose.height / rig.intrinsics.fy};
            CHECK(std::abs(back.x - w.x) < 1e-6);
            CHECK(std::abs(back.y - w.y) < 1e-6);
        }
    }
}
