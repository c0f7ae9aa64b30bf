#include <doctest.h>

#include <cmath>

#include "hardylab/geometry.hpp"

using namespace hardylab;

namespace {

Domain unit_square() {
  return make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "square");
}

}  // namespace

TEST_CASE("unit square basics") {
  Domain d = unit_square();
  CHECK(d.boundary_diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  auto [dist1, in1] = d.distance_inside({0.5, 0.5});
  CHECK(dist1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(in1);
  auto [dist2, in2] = d.distance_inside({0.2, 0.5});
  CHECK(dist2 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(in2);
  CHECK(!d.inside({1.5, 0.5}));
  CHECK(d.boundary_distance({1.5, 0.5}) == doctest::Approx(0.5));
}

TEST_CASE("equilateral triangle inradius at the centroid") {
  double h = std::sqrt(3.0) / 2.0;
  Domain d = make_polygon_domain({{0, 0}, {1, 0}, {0.5, h}});
  Vec2 centroid{0.5, h / 3.0};
  auto [dist, in] = d.distance_inside(centroid);
  CHECK(in);
  CHECK(dist == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));
}

TEST_CASE("degenerate polygons are rejected") {
  CHECK_THROWS_AS(make_polygon_domain({{0, 0}, {1, 1}}), Error);
  // collinear "triangle"
  CHECK_THROWS_AS(make_polygon_domain({{0, 0}, {0.5, 0.5}, {1, 1}}), Error);
  // bowtie
  CHECK_THROWS_AS(make_polygon_domain({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);
  // repeated vertex makes a zero-length edge
  CHECK_THROWS_AS(make_polygon_domain({{0, 0}, {0, 0}, {1, 0}, {1, 1}}), Error);
}

TEST_CASE("koch snowflake construction") {
  Domain k0 = make_koch_snowflake(0);
  auto* segs0 = dynamic_cast<const SegmentSet*>(&k0.boundary());
  REQUIRE(segs0 != nullptr);
  CHECK(segs0->segments().size() == 3);

  // level-0 triangle of side 0.75: inradius at the centroid.
  auto [dist, in] = k0.distance_inside({0.5, 0.5});
  CHECK(in);
  CHECK(dist == doctest::Approx(0.75 / (2.0 * std::sqrt(3.0))).epsilon(1e-9));

  Domain k2 = make_koch_snowflake(2);
  auto* segs2 = dynamic_cast<const SegmentSet*>(&k2.boundary());
  REQUIRE(segs2 != nullptr);
  CHECK(segs2->segments().size() == 3 * 4 * 4);
  for (const Segment& s : segs2->segments())
    CHECK(s.length() == doctest::Approx(0.75 / 9.0).epsilon(1e-12));

  CHECK(*k2.known_aikawa_dim() ==
        doctest::Approx(std::log(4.0) / std::log(3.0)).epsilon(1e-15));

  CHECK_THROWS_AS(make_koch_snowflake(9), Error);
  CHECK_THROWS_AS(make_koch_snowflake(-1), Error);
}

TEST_CASE("koch snowflake nests the previous level's inscribed disk") {
  Vec2 centroid{0.5, 0.5};
  for (int level = 1; level <= 4; ++level) {
    Domain prev = make_koch_snowflake(level - 1);
    Domain cur = make_koch_snowflake(level);
    double r = prev.boundary_distance(centroid) * 0.999;
    for (int i = 0; i < 256; ++i) {
      double a = 2.0 * M_PI * i / 256;
      CHECK(cur.inside(centroid + r * Vec2{std::cos(a), std::sin(a)}));
    }
  }
}

TEST_CASE("cantor dust squares at level 1") {
  Domain d = make_cantor_dust_complement(1.0 / 3.0, 1);
  auto* dust = dynamic_cast<const DustBoundarySet*>(&d.boundary());
  REQUIRE(dust != nullptr);
  auto squares = dust->squares();
  REQUIRE(squares.size() == 4);
  // corners of [0,1]^2, side 1/3
  CHECK(squares[0].lo == Vec2{0, 0});
  CHECK(squares[0].hi.x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(squares[3].lo.x == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(squares[3].hi == Vec2{1, 1});

  CHECK(*d.known_aikawa_dim() ==
        doctest::Approx(2.0 * std::log(2.0) / std::log(3.0)).epsilon(1e-15));
  CHECK(d.complement_null());
  CHECK(!d.is_bounded());

  Domain quarter = make_cantor_dust_complement(0.25, 2);
  CHECK(*quarter.known_aikawa_dim() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(make_cantor_dust_complement(0.5, 2), Error);
  CHECK_THROWS_AS(make_cantor_dust_complement(1.0 / 3.0, 8), Error);
}

// Independent brute force over all squares, replicating inside-distance.
static double brute_dust_distance(const std::vector<Box>& squares, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Box& b : squares) {
    double out = b.distance(p);
    double d;
    if (out > 0) {
      d = out;
    } else {
      d = std::min(std::min(p.x - b.lo.x, b.hi.x - p.x),
                   std::min(p.y - b.lo.y, b.hi.y - p.y));
    }
    best = std::min(best, d);
  }
  return best;
}

TEST_CASE("dust tree distance equals brute force") {
  Domain d = make_cantor_dust_complement(1.0 / 3.0, 4);
  auto* dust = dynamic_cast<const DustBoundarySet*>(&d.boundary());
  auto squares = dust->squares();
  REQUIRE(squares.size() == 256);
  Rng rng(99);
  Box window{{-0.5, -0.5}, {1.5, 1.5}};
  for (int i = 0; i < 1000; ++i) {
    Vec2 p = rng.point_in(window);
    CHECK(std::abs(dust->distance(p) - brute_dust_distance(squares, p)) <=
          1e-12);
  }
}

TEST_CASE("dust inside test agrees with the squares") {
  Domain d = make_cantor_dust_complement(1.0 / 3.0, 3);
  auto* dust = dynamic_cast<const DustBoundarySet*>(&d.boundary());
  auto squares = dust->squares();
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    Vec2 p = rng.point_in({{0, 0}, {1, 1}});
    bool in_any = false;
    for (const Box& b : squares) in_any = in_any || b.contains(p);
    CHECK(dust->in_dust(p) == in_any);
    CHECK(d.inside(p) == !in_any);
  }
}

TEST_CASE("boundary distance is 1-Lipschitz") {
  std::vector<Domain> domains = {unit_square(), make_koch_snowflake(3),
                                 make_cantor_dust_complement(1.0 / 3.0, 3)};
  for (const Domain& d : domains) {
    Box bb = d.boundary().bounding_box();
    Box window = bb.expanded(std::max(bb.width(), bb.height()) / 2);
    Rng rng(2024);
    for (int i = 0; i < 10000; ++i) {
      Vec2 x = rng.point_in(window), y = rng.point_in(window);
      CHECK(std::abs(d.boundary_distance(x) - d.boundary_distance(y)) <=
            dist(x, y) + 1e-9);
    }
  }
}

TEST_CASE("nearest_point realizes the distance") {
  std::vector<const SetOracle*> sets;
  Domain koch = make_koch_snowflake(3);
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 3);
  PointSet pts({{0.3, 0.4}, {0.7, 0.2}});
  sets.push_back(&koch.boundary());
  sets.push_back(&dust.boundary());
  sets.push_back(&pts);
  Rng rng(5);
  for (const SetOracle* s : sets) {
    for (int i = 0; i < 200; ++i) {
      Vec2 p = rng.point_in({{-0.2, -0.2}, {1.2, 1.2}});
      Vec2 q = s->nearest_point(p);
      CHECK(dist(p, q) == doctest::Approx(s->distance(p)).epsilon(1e-9));
      CHECK(s->distance(q) <= 1e-9);
    }
  }
}

TEST_CASE("sampled boundary points lie on the set") {
  Domain koch = make_koch_snowflake(4);
  for (Vec2 p : koch.boundary().sample_points(50, 11))
    CHECK(koch.boundary_distance(p) <= 1e-12);
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 4);
  for (Vec2 p : dust.boundary().sample_points(50, 11))
    CHECK(dust.boundary_distance(p) <= 1e-12);
}
