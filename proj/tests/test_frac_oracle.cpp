#include <doctest.h>

#include <cmath>

#include "hardylab/approx.hpp"
#include "hardylab/inequality.hpp"

using namespace hardylab;

// Monte-Carlo oracle for the Gagliardo seminorm over the resolved cover
// region, with singularity-weighted (polar) sampling: y = x + rho * omega,
// rho uniform in (0, sqrt(2)], so the density in the plane is
// 1 / (2 pi sqrt(2) rho) and the weight stays bounded near the diagonal.
static void mc_gagliardo(const ScalarField& f, const WhitneyCover& cover,
                         double s, double p, size_t samples, uint64_t seed,
                         double* mean, double* sigma) {
  Rng rng(seed);
  double rho_max = std::sqrt(2.0);
  Kahan acc, acc2;
  for (size_t i = 0; i < samples; ++i) {
    Vec2 x = rng.point_in({{0, 0}, {1, 1}});
    double rho = rng.uniform() * rho_max;
    double theta = rng.uniform() * 2.0 * M_PI;
    Vec2 y = x + rho * Vec2{std::cos(theta), std::sin(theta)};
    double val = 0.0;
    if (rho > 0 && cover.find_containing(x) >= 0 &&
        cover.find_containing(y) >= 0) {
      double df = std::abs(f(x) - f(y));
      if (df > 0) {
        double integrand = std::pow(df, p) * std::pow(rho, -2.0 - s * p);
        val = integrand * 2.0 * M_PI * rho_max * rho;  // 1/density
      }
    }
    acc.add(val);
    acc2.add(val * val);
  }
  double m = acc.value() / double(samples);
  double var = acc2.value() / double(samples) - m * m;
  *mean = m;
  *sigma = std::sqrt(std::max(var, 0.0) / double(samples));
}

TEST_CASE("gagliardo seminorm matches the Monte-Carlo oracle") {
  Domain sq = make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "square");
  WhitneyCover cover = whitney_cover(sq, 7);
  ScalarField f = coordinate_field(0);
  double s = 0.5, p = 2.0;

  double quad = frac_seminorm(f, cover, s, p);
  double mc = 0.0, sigma = 0.0;
  mc_gagliardo(f, cover, s, p, 10'000'000, 20240601, &mc, &sigma);

  double quad_p = std::pow(quad, p);
  INFO("quad^p = " << quad_p << ", mc = " << mc << ", sigma = " << sigma);
  CHECK(std::abs(quad_p - mc) <= 3.0 * sigma + 1e-9);
}

TEST_CASE("gagliardo seminorm matches the oracle for a bump too") {
  Domain sq = make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "square");
  WhitneyCover cover = whitney_cover(sq, 7);
  ScalarField f = bump_field({0.4, 0.55}, 0.3);
  double s = 0.4, p = 2.0;

  double quad = frac_seminorm(f, cover, s, p);
  double mc = 0.0, sigma = 0.0;
  mc_gagliardo(f, cover, s, p, 6'000'000, 777, &mc, &sigma);

  double quad_p = std::pow(quad, p);
  INFO("quad^p = " << quad_p << ", mc = " << mc << ", sigma = " << sigma);
  CHECK(std::abs(quad_p - mc) <= 3.0 * sigma + 1e-9);
}

TEST_CASE("gagliardo seminorm is self-convergent under refinement") {
  Domain sq = make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "square");
  ScalarField f = bump_field({0.5, 0.5}, 0.3);
  double s6 = frac_seminorm(f, whitney_cover(sq, 6), 0.5, 2.0);
  double s7 = frac_seminorm(f, whitney_cover(sq, 7), 0.5, 2.0);
  CHECK(std::abs(s7 - s6) / s6 <= 0.05);
}

TEST_CASE("complement kernel tail integral matches a radial oracle") {
  // T(x) for the unit square: integral over the plane minus the square of
  // |x-y|^(-2-sp). Radial oracle: per direction, the kernel tail from the
  // exit distance, rho_exit^(-sp)/sp, averaged over 1 << 14 directions.
  Domain sq = make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "square");
  WhitneyCover cover = whitney_cover(sq, 8);
  double s = 0.3, p = 2.0, sp = s * p;

  auto ray_exit = [](Vec2 x, double ca, double sa) {
    double t = std::numeric_limits<double>::infinity();
    if (ca > 0) t = std::min(t, (1.0 - x.x) / ca);
    if (ca < 0) t = std::min(t, (0.0 - x.x) / ca);
    if (sa > 0) t = std::min(t, (1.0 - x.y) / sa);
    if (sa < 0) t = std::min(t, (0.0 - x.y) / sa);
    return t;
  };

  for (Vec2 x : {Vec2{0.5, 0.5}, Vec2{0.3, 0.2}, Vec2{0.85, 0.6}}) {
    int nd = 1 << 14;
    Kahan acc;
    for (int i = 0; i < nd; ++i) {
      double a = (i + 0.5) * 2.0 * M_PI / nd;
      double ca = std::cos(a), sa = std::sin(a);
      acc.add(std::pow(ray_exit(x, ca, sa), -sp) / sp);
    }
    double oracle = acc.value() * 2.0 * M_PI / nd;

    double got = complement_kernel_integral(cover, x, s, p);
    double d = sq.boundary_distance(x);
    double bound = 2.0 * M_PI * std::pow(d, -sp) / sp;
    INFO("x = (" << x.x << "," << x.y << ") got " << got << " oracle "
                 << oracle);
    CHECK(got == doctest::Approx(oracle).epsilon(0.01));
    CHECK(got <= bound * (1.0 + 1e-9));
  }
}
