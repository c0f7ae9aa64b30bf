#include <doctest.h>

#include <cmath>

#include "hardylab/inequality.hpp"

using namespace hardylab;

TEST_CASE("hardy sweep produces finite ratios and honors the interior bound") {
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 3);
  std::vector<ScalarField> corpus;
  corpus.push_back(bump_field({0.5, 0.5}, 0.1));   // interior gap bump
  Vec2 on = dust.boundary().sample_points(1, 5)[0];
  corpus.push_back(bump_field(on, 0.2));
  std::vector<HardyGridPoint> grid = {{0.3, 2, 2}, {0.45, 2, 2}};
  std::vector<int> jlist = {5, 6};

  HardyReport rep = hardy_ratio_sweep(dust, corpus, grid, jlist, {});
  CHECK(rep.entries.size() == corpus.size() * grid.size() * jlist.size());
  for (const HardyEntry& e : rep.entries) {
    CHECK(e.lhs >= 0);
    CHECK(e.rhs > 0);
    CHECK(std::isfinite(e.ratio));
  }
  CHECK(rep.sup_rows.size() == grid.size() * jlist.size());
  for (const HardySupRow& r : rep.sup_rows) CHECK(r.sup_ratio > 0);

  // A field supported at distance d0 from the boundary has
  // lhs <= d0^-s ||f||_p, so its ratio is at most d0^-s.
  const ScalarField& inner = corpus[0];
  double d0 = dust.boundary_distance({0.5, 0.5}) - 0.1;
  REQUIRE(d0 > 0);
  for (const HardyEntry& e : rep.entries)
    if (e.corpus_id == inner.id())
      CHECK(e.ratio <= std::pow(d0, -e.s) * 1.01);
}

TEST_CASE("corpus builder is deterministic and well-formed") {
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 4);
  auto a = make_test_corpus(dust, 99);
  auto b = make_test_corpus(dust, 99);
  REQUIRE(a.size() == 17);  // 5 centers x 3 scales + 2 coordinates
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id() == b[i].id());
    Vec2 probe{0.37, 0.61};
    CHECK(a[i](probe) == b[i](probe));
  }
}

TEST_CASE("tl-norm rhs variant runs for q != p") {
  Domain sq = make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  std::vector<ScalarField> corpus = {bump_field({0.5, 0.5}, 0.25)};
  std::vector<HardyGridPoint> grid = {{0.4, 2, 3}};
  std::vector<int> jlist = {5, 6};
  HardyReport rep = hardy_ratio_sweep(sq, corpus, grid, jlist, {});
  for (const HardyEntry& e : rep.entries) {
    CHECK(e.q == 3);
    CHECK(std::isfinite(e.ratio));
  }
}

TEST_CASE("multiplier ratio is stable across resolutions on the dust") {
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 3);
  NormParams np = NormParams::make(0.3, 2.0, 2.0);
  Vec2 on = dust.boundary().sample_points(1, 31)[0];
  ScalarField f = bump_field(on, 0.18);
  MultiplierResult r6 = multiplier_ratio(f, dust, np, 6);
  MultiplierResult r7 = multiplier_ratio(f, dust, np, 7);
  REQUIRE(r6.defined);
  REQUIRE(r7.defined);
  CHECK(r6.ratio > 0);
  CHECK(r7.ratio / r6.ratio >= 0.5);
  CHECK(r7.ratio / r6.ratio <= 2.0);
  // the masked norm is bounded by roughly the plain norm plus the Hardy part
  CHECK(r7.norm_masked <= 3.0 * (r7.norm_plain + r7.hardy_part));
}
