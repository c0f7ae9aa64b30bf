#include <doctest.h>

#include <cmath>

#include "hardylab/parallel.hpp"
#include "hardylab/quadrature.hpp"
#include "hardylab/util.hpp"

using namespace hardylab;

TEST_CASE("gauss rules integrate polynomials exactly") {
  // Order g is exact through degree 2g-1 on [0,1].
  for (int g = 1; g <= 8; ++g) {
    const GaussRule& r = gauss_rule(g);
    for (int deg = 0; deg <= 2 * g - 1; ++deg) {
      double acc = 0.0;
      for (size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * std::pow(r.nodes[i], deg);
      CHECK(acc == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("tensor gauss integrates over boxes") {
  Box b{{0.25, 0.5}, {0.75, 1.5}};
  double acc = 0.0;
  tensor_gauss(b, 4, [&](Vec2 p, double w) { acc += w * p.x * p.y; });
  // integral of x over [.25,.75] = .25, of y over [.5,1.5] = 1.
  CHECK(acc == doctest::Approx(0.25 * 1.0).epsilon(1e-13));
}

TEST_CASE("block_reduce is independent of parallelism degree") {
  Rng rng(123);
  std::vector<double> data(20000);
  for (double& v : data) v = (rng.uniform() - 0.5) * std::exp(rng.uniform(0, 20));
  auto run = [&](int jobs) {
    set_parallelism(jobs);
    return block_reduce(data.size(), 512,
                        [&](size_t i, Kahan& acc) { acc.add(data[i]); });
  };
  double s1 = run(1), s2 = run(2), s4 = run(4);
  set_parallelism(0);
  CHECK(s1 == s2);
  CHECK(s1 == s4);
}

TEST_CASE("segment distance and intersection basics") {
  CHECK(segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(segment_distance({2, 0}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(segments_intersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  CHECK(!segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  // touching counts as intersecting
  CHECK(segments_intersect({0, 0}, {1, 0}, {1, 0}, {2, 5}));
}

TEST_CASE("box segment distance") {
  Box b{{0, 0}, {1, 1}};
  CHECK(box_segment_distance(b, {2, 0.5}, {3, 0.5}) == doctest::Approx(1.0));
  CHECK(box_segment_distance(b, {0.5, 0.5}, {3, 0.5}) == 0.0);
  CHECK(box_segment_distance(b, {-1, 2}, {2, 2}) == doctest::Approx(1.0));
}

TEST_CASE("rng is deterministic and uniform mapping stays in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("fnv1a hash is stable") {
  CHECK(fnv1a(std::string("")) == 0xcbf29ce484222325ull);
  CHECK(fnv1a(std::string("a")) != fnv1a(std::string("b")));
}
