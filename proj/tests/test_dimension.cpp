#include <doctest.h>

#include <cmath>

#include "hardylab/inequality.hpp"

using namespace hardylab;

TEST_CASE("koch boundary dimension estimate brackets log4/log3") {
  Domain koch = make_koch_snowflake(5);
  const SetOracle& bdry = koch.boundary();
  std::vector<Vec2> probes = bdry.sample_points(6, 13);
  std::vector<double> radii = {0.3, 0.15, 0.075, 0.0375};
  std::vector<double> s_grid;
  for (double s = 1.0; s <= 1.55; s += 0.02) s_grid.push_back(s);

  DimensionReport rep = estimate_aikawa_dimension(bdry, probes, radii, s_grid, {});
  INFO("estimate " << rep.dim_estimate << " box " << rep.box_counting_dim);
  CHECK(rep.dim_estimate >= 1.20);
  CHECK(rep.dim_estimate <= 1.32);
  CHECK(rep.box_counting_dim >= 1.15);
  CHECK(rep.box_counting_dim <= 1.4);
}

TEST_CASE("cantor dust dimension estimate (ratio 1/3)") {
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 5);
  const SetOracle& bdry = dust.boundary();
  std::vector<Vec2> probes = bdry.sample_points(6, 29);
  std::vector<double> radii = {0.3, 0.15, 0.075, 0.0375};
  std::vector<double> s_grid;
  for (double s = 1.0; s <= 1.55; s += 0.02) s_grid.push_back(s);

  DimensionReport rep = estimate_aikawa_dimension(bdry, probes, radii, s_grid, {});
  double truth = 2.0 * std::log(2.0) / std::log(3.0);
  INFO("estimate " << rep.dim_estimate << " truth " << truth);
  CHECK(std::abs(rep.dim_estimate - truth) <= 0.07);
}

TEST_CASE("box counting oracle for the dust agrees with 4^k at 3^-k") {
  // At scales 3^-k the dust meets exactly 4^k construction squares, so the
  // box-counting slope is pinned near 2 log 2 / log 3 within the window.
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 5);
  std::vector<double> scales;
  for (int k = 2; k <= 5; ++k) scales.push_back(std::pow(3.0, -k));
  double slope = box_counting_dimension(dust.boundary(), scales);
  double truth = 2.0 * std::log(2.0) / std::log(3.0);
  CHECK(std::abs(slope - truth) <= 0.12);
}
