#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rotkit/math.hpp"
#include "rotkit/rng.hpp"

using namespace rotkit;
using namespace rotkit::math;
using Catch::Approx;

namespace {
Quat negated(const Quat& q) { return Quat(-q.w, -q.x, -q.y, -q.z); }
}  // namespace

TEST_CASE("rotate_about_axis basic cases", "[math]") {
    const Quat id = Quat::identity();
    const UnitVec3 z = UnitVec3::z_axis();

    SECTION("zero angle is identity") {
        const Quat q = rotate_about_axis(id, z, 0.0);
        CHECK(q.w == Approx(1.0).margin(1e-12));
        CHECK(q.x == Approx(0.0).margin(1e-12));
    }
    SECTION("30 degrees about z") {
        const Quat q = rotate_about_axis(id, z, kPi / 6.0);
        CHECK(q.w == Approx(std::cos(kPi / 12.0)).epsilon(1e-12));
        CHECK(q.x == Approx(0.0).margin(1e-15));
        CHECK(q.y == Approx(0.0).margin(1e-15));
        CHECK(q.z == Approx(std::sin(kPi / 12.0)).epsilon(1e-12));
        CHECK(q.w == Approx(0.9659).margin(5e-5));
        CHECK(q.z == Approx(0.2588).margin(5e-5));
    }
    SECTION("twelve 30-degree turns close the circle up to sign") {
        Quat q = id;
        for (int i = 0; i < 12; ++i) q = rotate_about_axis(q, z, kPi / 6.0);
        CHECK(std::abs(q.dot(id)) == Approx(1.0).margin(1e-9));
    }
    SECTION("angle beyond pi rejected") {
        CHECK_THROWS_AS(rotate_about_axis(id, z, 3.5), std::domain_error);
    }
    SECTION("non-unit axis rejected at construction") {
        CHECK_THROWS_AS(UnitVec3(0.0, 0.0, 2.0), std::domain_error);
        CHECK_THROWS_AS(UnitVec3(Vec3{0.1, 0.1, 0.1}), std::domain_error);
    }
}

TEST_CASE("keypoints_of places and transforms the canonical six", "[math]") {
    SECTION("identity pose") {
        const KeypointSet set = keypoints_of(Pose{});
        CHECK(set.points[0].x == Approx(0.05));
        CHECK(set.points[1].x == Approx(-0.05));
        CHECK(set.points[4].z == Approx(0.05));
        for (const auto& p : set.points) CHECK(p.norm() == Approx(0.05));
    }
    SECTION("rigid translation shifts every point") {
        Pose pose;
        pose.position = {0.1, 0.0, 0.0};
        const KeypointSet base = keypoints_of(Pose{});
        const KeypointSet moved = keypoints_of(pose);
        for (int i = 0; i < kNumKeypoints; ++i) {
            CHECK(moved.points[i].x - base.points[i].x == Approx(0.1));
            CHECK(moved.points[i].y == Approx(base.points[i].y).margin(1e-15));
        }
    }
    SECTION("90 degree z rotation maps +x keypoint to +y") {
        Pose pose;
        pose.orientation = Quat::from_axis_angle(UnitVec3::z_axis(), kPi / 2.0);
        const KeypointSet set = keypoints_of(pose);
        CHECK(set.points[0].x == Approx(0.0).margin(1e-12));
        CHECK(set.points[0].y == Approx(0.05).epsilon(1e-9));
        CHECK(set.points[0].z == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("keypoint_distance matches analytic values", "[math]") {
    const Pose id{};

    SECTION("identical sets") {
        CHECK(keypoint_distance(id, id) == 0.0);
    }
    SECTION("uniform translation") {
        Pose moved;
        moved.position = {0.0, 0.01, 0.0};
        CHECK(keypoint_distance(id, moved) == Approx(0.01).epsilon(1e-12));
    }
    SECTION("90 degrees about z: four points move 0.05*sqrt(2)") {
        Pose rot;
        rot.orientation = Quat::from_axis_angle(UnitVec3::z_axis(), kPi / 2.0);
        const double analytic = 4.0 * 0.05 * std::sqrt(2.0) / 6.0;
        CHECK(keypoint_distance(id, rot) == Approx(analytic).margin(1e-9));
        CHECK(analytic == Approx(0.04714).margin(5e-6));
    }
}

TEST_CASE("delta_rotation_about_axis extracts signed projections", "[math]") {
    const Quat id = Quat::identity();
    const UnitVec3 z = UnitVec3::z_axis();
    const Quat turned = Quat::from_axis_angle(z, kPi / 6.0);

    CHECK(delta_rotation_about_axis(id, id, z) == Approx(0.0).margin(1e-15));
    CHECK(delta_rotation_about_axis(id, turned, z) == Approx(0.5235987755982988).epsilon(1e-12));
    CHECK(delta_rotation_about_axis(id, turned, UnitVec3::x_axis()) == Approx(0.0).margin(1e-12));
    CHECK(delta_rotation_about_axis(turned, id, z) == Approx(-0.5235987755982988).epsilon(1e-12));
}

TEST_CASE("axis_deviation with rest convention", "[math]") {
    const UnitVec3 z = UnitVec3::z_axis();

    SECTION("pure z rotation window") {
        std::vector<Quat> window;
        for (int i = 0; i < 10; ++i)
            window.push_back(Quat::from_axis_angle(z, 0.02 * i));
        CHECK(axis_deviation(window, z) == Approx(0.0).margin(1e-9));
    }
    SECTION("pure x rotation against z target") {
        std::vector<Quat> window;
        for (int i = 0; i < 10; ++i)
            window.push_back(Quat::from_axis_angle(UnitVec3::x_axis(), 0.02 * i));
        CHECK(axis_deviation(window, z) == Approx(kPi / 2.0).epsilon(1e-9));
    }
    SECTION("stationary window reports zero") {
        std::vector<Quat> window(10, Quat::identity());
        CHECK(axis_deviation(window, z) == 0.0);
    }
    SECTION("sub-epsilon net rotation reports zero") {
        std::vector<Quat> window{Quat::identity(),
                                 Quat::from_axis_angle(UnitVec3::x_axis(), 0.004)};
        CHECK(axis_deviation(window, z) == 0.0);
    }
    SECTION("window of one rejected") {
        std::vector<Quat> window{Quat::identity()};
        CHECK_THROWS_AS(axis_deviation(window, z), std::domain_error);
    }
}

TEST_CASE("rotation math properties hold on random inputs", "[math][property]") {
    Rng rng(20240811);

    SECTION("same-axis additivity") {
        for (int trial = 0; trial < 200; ++trial) {
            const Quat q = Quat::random(rng);
            const UnitVec3 k = UnitVec3::random(rng);
            const double a = rng.uniform(-1.5, 1.5);
            const double b = rng.uniform(-1.5, 1.5);
            if (std::abs(a + b) > kPi) continue;
            const Quat split = rotate_about_axis(rotate_about_axis(q, k, a), k, b);
            const Quat joint = rotate_about_axis(q, k, a + b);
            CHECK(std::abs(split.dot(joint)) == Approx(1.0).margin(1e-9));
        }
    }
    SECTION("keypoint distance is a symmetric premetric invariant under isometry") {
        for (int trial = 0; trial < 200; ++trial) {
            Pose a{Vec3{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)},
                   Quat::random(rng)};
            Pose b{Vec3{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)},
                   Quat::random(rng)};
            const double dab = keypoint_distance(a, b);
            CHECK(dab >= 0.0);
            CHECK(keypoint_distance(b, a) == Approx(dab).margin(1e-15));

            const Quat rot = Quat::random(rng);
            const Vec3 shift{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const auto moved = [&](const Pose& p) {
                return Pose{rot.rotate(p.position) + shift, rot * p.orientation};
            };
            CHECK(keypoint_distance(moved(a), moved(b)) == Approx(dab).margin(1e-9));
        }
        CHECK(keypoint_distance(Pose{}, Pose{}) == 0.0);
    }
    SECTION("delta rotation inverts rotate_about_axis") {
        for (int trial = 0; trial < 200; ++trial) {
            const Quat q = Quat::random(rng);
            const UnitVec3 k = UnitVec3::random(rng);
            const double theta = rng.uniform(-3.1, 3.1);
            const Quat turned = rotate_about_axis(q, k, theta);
            CHECK(delta_rotation_about_axis(q, turned, k) == Approx(theta).margin(1e-9));
        }
    }
    SECTION("double cover: q and -q give identical keypoints") {
        for (int trial = 0; trial < 100; ++trial) {
            const Quat q = Quat::random(rng);
            Pose a{Vec3{0.0, 0.0, 0.0}, q};
            Pose b{Vec3{0.0, 0.0, 0.0}, negated(q)};
            CHECK(keypoint_distance(a, b) == Approx(0.0).margin(1e-12));
        }
    }
}
