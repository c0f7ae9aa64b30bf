#include <doctest.h>

#include <set>

#include "hardylab/chains.hpp"
#include "hardylab/quadrature.hpp"

using namespace hardylab;

namespace {
Domain unit_square() {
  return make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "square");
}
Domain scaled_dust(int level) {
  return make_cantor_dust_complement(1.0 / 3.0, level, 1.0 / 16.0, {0.5, 0.5});
}
}  // namespace

TEST_CASE("john chains on the unit square") {
  Domain d = unit_square();
  WhitneyCover cover = whitney_cover(d, 6);
  ChainDecomposition decomp = build_john_chains(cover);

  // the root's chain is the single cube (Q0)
  int rt = decomp.find_target(decomp.root);
  REQUIRE(rt >= 0);
  CHECK(decomp.chains[rt].size() == 1);

  // every chain runs root -> target with pairwise distinct cubes
  for (size_t t = 0; t < decomp.chains.size(); ++t) {
    const auto& chain = decomp.chains[t];
    REQUIRE(!chain.empty());
    CHECK(chain.front() == decomp.root);
    CHECK(chain.back() == decomp.targets[t]);
    std::set<uint64_t> seen;
    for (const CubeKey& k : chain) seen.insert(k.pack());
    CHECK(seen.size() == chain.size());
  }

  // consecutive dilated cubes overlap with a uniformly positive ratio;
  // corner-touching neighbours across one level give ratios near 0.007
  CHECK(decomp.overlap_c > 0.0);
  CHECK(decomp.overlap_c >= 0.005);

  // shadow duality: R in C(Q) iff Q in S(R)
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    size_t t = rng.index(decomp.chains.size());
    const auto& chain = decomp.chains[t];
    const CubeKey& r = chain[rng.index(chain.size())];
    const auto& members = decomp.shadows.at(r);
    CHECK(std::count(members.begin(), members.end(), int(t)) == 1);
  }
  for (const auto& [r, members] : decomp.shadows)
    for (int t : members) {
      const auto& chain = decomp.chains[t];
      CHECK(std::count(chain.begin(), chain.end(), r) == 1);
    }
}

TEST_CASE("john chain conditions on the koch snowflake are refinement-stable") {
  Domain d = make_koch_snowflake(4);
  WhitneyCover c7 = whitney_cover(d, 7);
  WhitneyCover c8 = whitney_cover(d, 8);
  ChainDecomposition d7 = build_john_chains(c7);
  ChainDecomposition d8 = build_john_chains(c8);

  CHECK(std::abs(d7.tau - d8.tau) <= 1);
  CHECK(d7.shadow_radius_C > 0);
  CHECK(d8.shadow_radius_C / d7.shadow_radius_C >= 0.5);
  CHECK(d8.shadow_radius_C / d7.shadow_radius_C <= 2.0);
  CHECK(d8.overlap_c / d7.overlap_c >= 0.5);
  CHECK(d8.overlap_c / d7.overlap_c <= 2.0);

  ChainConditionsReport r7 = verify_chain_conditions(d7, 0.3, 2.0);
  ChainConditionsReport r8 = verify_chain_conditions(d8, 0.3, 2.0);
  CHECK(r7.sigma > 0);
  CHECK(std::isfinite(r7.sigma));
  CHECK(r8.sigma / r7.sigma <= 2.0);
  CHECK(r8.sigma / r7.sigma >= 0.5);
  // thin regime here: n - sp = 1.4 above dim_A ~ 1.2619
  CHECK(r7.eps_margin > 0);
}

TEST_CASE("john chains need a bounded domain and connectivity") {
  Domain dust = make_cantor_dust_complement(1.0 / 3.0, 2);
  WhitneyCover cover = whitney_cover(dust, 5);
  CHECK_THROWS_AS(build_john_chains(cover), Error);
}

TEST_CASE("dyadic chains on the normalized dust complement") {
  Domain d = scaled_dust(3);
  WhitneyCover cover = whitney_cover(d, 7);
  ChainDecomposition decomp = build_dyadic_chains(cover);

  CHECK(decomp.root == CubeKey{0, 0, 0});
  CHECK(decomp.gamma == doctest::Approx(7.0 * std::sqrt(2.0)));
  CHECK(decomp.tau == 0);
  CHECK(decomp.per_level_max == 1);

  // chain of a level-m cube has m+1 cubes and walks the ancestor line
  size_t small_count = 0;
  for (const WhitneyCube& wc : cover.cubes())
    if (wc.key.side() <= d.boundary_diameter()) ++small_count;
  CHECK(decomp.targets.size() == small_count);
  for (size_t t = 0; t < decomp.targets.size(); ++t) {
    const auto& chain = decomp.chains[t];
    CHECK(int(chain.size()) == decomp.targets[t].level + 1);
    for (size_t o = 0; o < chain.size(); ++o) {
      CHECK(chain[o].level == int(o));
      CHECK(chain[o].contains(decomp.targets[t]));
    }
  }

  // shadow containment is exact
  for (const auto& [r, members] : decomp.shadows)
    for (int t : members) CHECK(r.contains(decomp.targets[t]));

  // sigma is monotone in s on a fixed dyadic decomposition
  double s1 = verify_chain_conditions(decomp, 0.3, 2.0).sigma;
  double s2 = verify_chain_conditions(decomp, 0.45, 2.0).sigma;
  CHECK(s2 >= s1);
  CHECK_THROWS_AS(verify_chain_conditions(decomp, 1.1, 2.0), Error);
}

TEST_CASE("natural-scale dust cannot be normalized for dyadic chains") {
  Domain d = make_cantor_dust_complement(1.0 / 3.0, 3);  // width 1
  WhitneyCover cover = whitney_cover(d, 6);
  CHECK_THROWS_AS(build_dyadic_chains(cover), Error);
}

TEST_CASE("telescoping gap vanishes on low-degree polynomials") {
  Domain d = scaled_dust(3);
  WhitneyCover cover = whitney_cover(d, 7);
  ChainDecomposition decomp = build_dyadic_chains(cover);
  ScalarField affine = poly_field({{0, 0, 0.7}, {1, 0, -1.2}, {0, 1, 0.4}});
  auto [lhs, rhs] = telescoping_gap(affine, decomp, decomp.targets[0], 2);
  CHECK(lhs <= 1e-10);
  CHECK(rhs <= 1e-10);

  CHECK_THROWS_AS(telescoping_gap(affine, decomp, CubeKey{7, 1, 1}, 2), Error);
}

TEST_CASE("telescoping bound holds with one global constant") {
  Domain d = scaled_dust(3);
  WhitneyCover cover = whitney_cover(d, 7);
  ChainDecomposition decomp = build_dyadic_chains(cover);
  ScalarField f = bump_field({0.5, 0.5}, 0.1);

  Rng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const CubeKey& q = decomp.targets[rng.index(decomp.targets.size())];
    auto [lhs, rhs] = telescoping_gap(f, decomp, q, 1);
    if (rhs > 1e-14) worst = std::max(worst, lhs / rhs);
  }
  CHECK(worst > 0.0);
  CHECK(worst <= 50.0);

  // consecutive-step bound: projections on parent/child differ by at most a
  // constant times the parent's L1 approximation error
  double step_worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    const CubeKey& q = decomp.targets[rng.index(decomp.targets.size())];
    int t = decomp.find_target(q);
    const auto& chain = decomp.chains[t];
    for (size_t j = 1; j < chain.size(); ++j) {
      LocalPolynomial pj = project_polynomial(f, chain[j].box(), 1, 4);
      LocalPolynomial pj1 = project_polynomial(f, chain[j - 1].box(), 1, 4);
      double diff = 0.0;
      tensor_gauss(chain[j].box(), 4, [&](Vec2 x, double) {
        diff = std::max(diff, std::abs(pj(x) - pj1(x)));
      });
      double e = local_approx_error(f, chain[j - 1].box(), 1, 1.0, 4);
      if (e > 1e-14) step_worst = std::max(step_worst, diff / e);
    }
  }
  CHECK(step_worst <= 50.0);
}
