#include "vtg/geometry.hpp"

#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "vtg/cloud_io.hpp"
#include "vtg/rng.hpp"

using namespace vtg;

namespace {

RigidTransform random_transform(Rng& rng, const std::string& from,
                                const std::string& to) {
  RigidTransform t;
  t.rotation = rng.random_rotation();
  t.translation = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  t.from_frame = from;
  t.to_frame = to;
  return t;
}

PointCloud random_cloud(Rng& rng, int n, double extent) {
  PointCloud c;
  c.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    c.points.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                        rng.uniform(-extent, extent)});
  }
  return c;
}

}  // namespace

TEST_CASE("quaternion rotation matches rotation-matrix oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const RigidTransform t = random_transform(rng, "a", "b");
    const auto m = oracle::mat4_from_transform(t);
    const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 got = t.apply(p);
    const Vec3 want = oracle::mat4_apply(m, p);
    CHECK(distance(got, want) < 1e-12);
  }
}

TEST_CASE("slerp follows the axis-angle geodesic") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 axis = rng.unit_vector();
    const double angle = rng.uniform(0.01, 3.0);
    const double u = rng.uniform();
    const Quat got = slerp(Quat::identity(), Quat::from_axis_angle(axis, angle), u);
    const Quat want = Quat::from_axis_angle(axis, u * angle);
    CHECK(got.angle_to(want) < 1e-7);
  }
}

TEST_CASE("slerp hits endpoints and takes the shorter arc") {
  Rng rng(14);
  const Quat a = rng.random_rotation();
  const Quat b = rng.random_rotation();
  CHECK(slerp(a, b, 0.0).angle_to(a) < 1e-7);
  CHECK(slerp(a, b, 1.0).angle_to(b) < 1e-7);
  CHECK(slerp(a, b, 0.37).angle_to(a) == doctest::Approx(0.37 * a.angle_to(b)));

  const Quat b_neg{-b.w, -b.x, -b.y, -b.z};  // same rotation, opposite sign
  CHECK(slerp(a, b, 0.5).angle_to(slerp(a, b_neg, 0.5)) < 1e-7);

  CHECK(slerp(a, a, 0.5).angle_to(a) < 1e-7);  // degenerate pair
}

TEST_CASE("compose matches 4x4 homogeneous matrix product") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const RigidTransform a = random_transform(rng, "b", "c");
    const RigidTransform b = random_transform(rng, "a", "b");
    const RigidTransform got = compose(a, b);
    const auto want =
        oracle::mat4_mul(oracle::mat4_from_transform(a), oracle::mat4_from_transform(b));
    for (int i = 0; i < 20; ++i) {
      const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      CHECK(distance(got.apply(p), oracle::mat4_apply(want, p)) < 1e-10);
    }
    CHECK(got.from_frame == "a");
    CHECK(got.to_frame == "c");
  }
}

TEST_CASE("compose with mismatched frames throws") {
  Rng rng(13);
  const RigidTransform a = random_transform(rng, "wrist", "base");
  const RigidTransform b = random_transform(rng, "tag", "camera");
  CHECK_THROWS_AS(compose(a, b), FrameMismatchError);
}

TEST_CASE("inverse composes to identity and swaps frames") {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform t = random_transform(rng, "camera", "base");
    const RigidTransform inv = inverse(t);
    CHECK(inv.from_frame == "base");
    CHECK(inv.to_frame == "camera");
    const RigidTransform id = compose(inv, t);
    const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(distance(id.apply(p), p) < 1e-12);
  }
}

TEST_CASE("transform_cloud preserves pairwise distances and maps viewpoint") {
  Rng rng(15);
  PointCloud cloud = random_cloud(rng, 100, 1.0);
  cloud.viewpoint = {0.1, 0.2, 0.3};
  const RigidTransform t = random_transform(rng, "camera", "base");
  const PointCloud moved = transform_cloud(t, cloud);

  REQUIRE(moved.size() == cloud.size());
  CHECK(distance(moved.viewpoint, t.apply(cloud.viewpoint)) < 1e-15);
  for (int trial = 0; trial < 200; ++trial) {
    const int i = int(rng.uniform_int(0, int(cloud.size()) - 1));
    const int j = int(rng.uniform_int(0, int(cloud.size()) - 1));
    const double before = distance(cloud.points[i], cloud.points[j]);
    const double after = distance(moved.points[i], moved.points[j]);
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("radius_search equals brute-force scan, ordered and tie-broken") {
  Rng rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud cloud = random_cloud(rng, 300, 0.5);
    const NeighborIndex index(cloud);
    for (int q = 0; q < 20; ++q) {
      const Vec3 query{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                       rng.uniform(-0.5, 0.5)};
      const double r = rng.uniform(0.0, 0.4);
      CHECK(index.radius_search(query, r) == oracle::brute_radius(cloud, query, r));
    }
  }
}

TEST_CASE("radius_search handles exact duplicate points via index ties") {
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  const NeighborIndex index(cloud);
  const auto got = index.radius_search({1, 0, 0}, 0.5);
  CHECK(got == std::vector<int>{1, 2, 3});
  CHECK(got == oracle::brute_radius(cloud, {1, 0, 0}, 0.5));
}

TEST_CASE("knn equals distance-sorted brute force") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud cloud = random_cloud(rng, 257, 0.5);
    const NeighborIndex index(cloud);
    for (int k : {1, 2, 7, 50, 257, 400}) {
      const Vec3 query{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6),
                       rng.uniform(-0.6, 0.6)};
      CHECK(index.knn(query, k) == oracle::brute_knn(cloud, query, k));
    }
  }
}

TEST_CASE("knn with k larger than the cloud returns every point") {
  Rng rng(18);
  const PointCloud cloud = random_cloud(rng, 10, 1.0);
  const NeighborIndex index(cloud);
  CHECK(index.knn({0, 0, 0}, 99).size() == 10);
}

TEST_CASE("cloud file round-trip preserves points, colors and viewpoint") {
  Rng rng(19);
  PointCloud cloud = random_cloud(rng, 50, 2.0);
  cloud.viewpoint = {0.5, -0.25, 1.0};
  for (int i = 0; i < 50; ++i) {
    cloud.colors.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
  }

  std::stringstream buf;
  save_cloud(buf, cloud);
  const PointCloud back = load_cloud(buf);

  REQUIRE(back.size() == cloud.size());
  REQUIRE(back.has_colors());
  CHECK(distance(back.viewpoint, cloud.viewpoint) < 1e-8);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(distance(back.points[i], cloud.points[i]) < 1e-8);
    CHECK(distance(back.colors[i], cloud.colors[i]) < 1e-8);
  }
}

TEST_CASE("cloud loader rejects malformed input with line numbers") {
  SUBCASE("bad header") {
    std::stringstream buf("clod v1 n=1 color=0 viewpoint=0 0 0\n0 0 0\n");
    CHECK_THROWS_AS(load_cloud(buf), IoError);
  }
  SUBCASE("non-finite coordinate") {
    std::stringstream buf("cloud v1 n=1 color=0 viewpoint=0 0 0\n0 nan 0\n");
    CHECK_THROWS_AS(load_cloud(buf), IoError);
  }
  SUBCASE("count mismatch: too few") {
    std::stringstream buf("cloud v1 n=3 color=0 viewpoint=0 0 0\n0 0 0\n1 1 1\n");
    CHECK_THROWS_AS(load_cloud(buf), IoError);
  }
  SUBCASE("count mismatch: too many") {
    std::stringstream buf("cloud v1 n=1 color=0 viewpoint=0 0 0\n0 0 0\n1 1 1\n");
    CHECK_THROWS_AS(load_cloud(buf), IoError);
  }
  SUBCASE("missing color columns") {
    std::stringstream buf("cloud v1 n=1 color=1 viewpoint=0 0 0\n0 0 0\n");
    CHECK_THROWS_AS(load_cloud(buf), IoError);
  }
  SUBCASE("line number is reported") {
    std::stringstream buf("cloud v1 n=2 color=0 viewpoint=0 0 0\n0 0 0\nx y z\n");
    try {
      load_cloud(buf, "test.cloud");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("test.cloud:3") != std::string::npos);
    }
  }
}

TEST_CASE("rng streams are deterministic and independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng base(7);
  Rng s1 = base.stream(1);
  Rng s1_again = base.stream(1);
  Rng s2 = base.stream(2);
  CHECK(s1.next_u64() == s1_again.next_u64());
  CHECK(s1.next_u64() != s2.next_u64());
}
