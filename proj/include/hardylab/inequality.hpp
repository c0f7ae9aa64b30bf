#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardylab/approx.hpp"
#include "hardylab/chains.hpp"

namespace hardylab {

// ---------------------------------------------------------------------------
// Weighted ball integrals: integral over B(x,r) of dist(y,E)^e dy, the common
// engine behind the Aikawa integral, the bump test and the reverse Holder
// check. Adaptive quadtree refinement toward E and toward the sphere, with
// dyadic distance shells kept for divergence detection.
// ---------------------------------------------------------------------------

struct BallIntegralOptions {
  int max_depth = 12;           // refinement depth relative to r
  double refine_factor = 2.0;   // refine while dist(cell, E) < factor * side
  int gauss = 3;
  double divergence_slope = 0.02;  // nats/octave on the shell regression
  int min_shells = 3;
};

struct BallIntegralEval {
  double value = 0.0;        // partial integral at the finest refinement
  bool divergent = false;    // shell sums grow toward the set
  double shell_slope = 0.0;  // fitted log-slope of in-window shell sums
  double collar_bound = 0.0; // estimate of the unresolved near-set part
};

// One pass, one exponent per entry of `exponents` (integrand dist^e).
std::vector<BallIntegralEval> ball_weighted_integral(
    const SetOracle& E, Vec2 x, double r, std::span<const double> exponents,
    const BallIntegralOptions& opts = {});

// Aikawa integral: integral over B(x,r) of dist(y,E)^(s-n) dy.
// Returns +infinity when the divergence signal fires.
double aikawa_integral(const SetOracle& E, Vec2 x, double r, double s,
                       const BallIntegralOptions& opts = {});

// ---------------------------------------------------------------------------
// Dimension estimation
// ---------------------------------------------------------------------------

struct DimensionRow {
  int probe_id = 0;
  double r = 0.0;
  double s = 0.0;
  double integral = 0.0;   // I(x, r, s); +inf when divergent
  double ratio = 0.0;      // I / r^s
};

struct DimensionReport {
  std::string set_name;
  std::vector<Vec2> probes;
  std::vector<double> radii;
  std::vector<double> s_grid;
  std::vector<DimensionRow> table;
  std::vector<bool> admissible;   // per s-grid entry: s in A(E)?
  double dim_estimate = 0.0;      // first admissible grid point
  double dim_bracket_lo = 0.0;    // previous grid point (or 0)
  double box_counting_dim = 0.0;  // cross-check slope
  double ratio_threshold = 10.0;
};

struct DimensionOptions {
  double ratio_threshold = 10.0;
  BallIntegralOptions ball;
};

DimensionReport estimate_aikawa_dimension(const SetOracle& E,
                                          std::span<const Vec2> probes,
                                          std::span<const double> radii,
                                          std::span<const double> s_grid,
                                          const DimensionOptions& opts = {});

// Box-counting slope over the given scales (counts cells meeting E).
double box_counting_dimension(const SetOracle& E, std::span<const double> scales);

// ---------------------------------------------------------------------------
// Porosity
// ---------------------------------------------------------------------------

// Smallest kappa from {2,4,...,64} such that every sampled cube Q(x,r)
// contains a grid point y with dist(y,S) >= sqrt(n) r / kappa; nullopt when
// kappa = 64 still fails.
std::optional<double> porosity_constant(const SetOracle& S,
                                        std::span<const double> scales,
                                        int samples, uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Hardy machinery
// ---------------------------------------------------------------------------

struct HardyDetail {
  double collar_bound = 0.0;  // bound on the unresolved-collar contribution
};

// (sum over cover cubes of the integral of |f|^p dist^(-sp))^(1/p).
double hardy_functional(const ScalarField& f, const WhitneyCover& cover,
                        double s, double p, HardyDetail* detail = nullptr);
std::vector<double> hardy_functional_multi(const ScalarField& f,
                                           const WhitneyCover& cover,
                                           std::span<const double> s_list,
                                           double p,
                                           HardyDetail* detail = nullptr);

struct HardyEntry {
  double s = 0, p = 0, q = 0;
  int j_max = 0;
  std::string corpus_id;
  double lhs = 0, rhs = 0, ratio = 0;
};

struct HardySupRow {
  double s = 0, p = 0, q = 0;
  int j_max = 0;
  double sup_ratio = 0;
};

struct HardyReport {
  std::vector<HardyEntry> entries;
  std::vector<HardySupRow> sup_rows;
  // growth of the sup ratio from the first to the last resolution, per
  // (s,p,q) grid point, in grid order
  std::vector<double> growth;
  std::vector<double> growth_s;  // s value per growth entry
  // dichotomy bracket: last stable / first growing s at the given threshold
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double growth_threshold = 0.0;
};

struct HardyGridPoint {
  double s = 0, p = 2, q = 2;
};

struct HardySweepOptions {
  double growth_threshold = 1.05;  // sup-ratio growth marking divergence
  int tl_j_min = 0;
};

HardyReport hardy_ratio_sweep(const Domain& domain,
                              std::span<const ScalarField> corpus,
                              std::span<const HardyGridPoint> grid,
                              std::span<const int> j_max_list,
                              const HardySweepOptions& opts = {});

// Fixed experiment corpus: radial bumps at 3 scales x 5 centers
// (on / near / off the boundary) plus the two coordinate fields.
std::vector<ScalarField> make_test_corpus(const Domain& domain, uint64_t seed);

// ---------------------------------------------------------------------------
// Homogeneity
// ---------------------------------------------------------------------------

struct HomogeneityResult {
  double slope = 0.0;  // d log(norm) / d log(1/r); compare with s - n/p
  std::vector<double> norms;  // profile-term norms per radius
};

// Norms of the concentrated copies x -> f(x/r) over the unit window; the
// fitted exponent of r^(n/p - s) against log(1/r) equals s - n/p.
HomogeneityResult homogeneity_slope(const ScalarField& f,
                                    const NormParams& params,
                                    std::span<const double> radii,
                                    int j_max = 8);

// ---------------------------------------------------------------------------
// Thin-boundary pointwise estimates
// ---------------------------------------------------------------------------

// lhs = integral over B(x, r/2) of dist^(-sp); rhs = c r^(n-sp) with c
// calibrated at r = 1.
std::pair<double, double> bump_dimension_test(const Domain& domain, Vec2 x,
                                              double r, double s, double p);

// lhs = (avg over B of dist^(-sp))^(1/p), rhs = avg over B of dist^(-s).
std::pair<double, double> reverse_holder_dist(const Domain& domain, Vec2 x,
                                              double r, double s, double p);

// Exact cell-sum evaluation of the two sides of the cube-family reverse
// Holder inequality for finitely supported nonnegative weights.
std::pair<double, double> reverse_holder_cubes(std::span<const CubeKey> cubes,
                                               std::span<const double> weights,
                                               double p, double q);

// ---------------------------------------------------------------------------
// Zero extension and multipliers
// ---------------------------------------------------------------------------

// T(x) = integral over the complement of G of |x-y|^(-2-sp) dy for x in G,
// computed exactly as the radial tail 2 pi dist^(-sp)/(sp) minus the kernel
// integral over (resolved G) \ B(x, dist).
double complement_kernel_integral(const WhitneyCover& cover, Vec2 x, double s,
                                  double p);

struct ZeroExtensionResult {
  double ext_seminorm_p = 0.0;       // |E0 f|_{W^{s,p}(R^n)}^p via the split
  double interior_seminorm_p = 0.0;  // |f|_{W^{s,p}(G)}^p
  double hardy_term_p = 0.0;         // integral of |f|^p dist^(-sp)
  bool tail_bound_ok = false;        // T(x) <= 2 pi dist^(-sp) / (sp) at nodes
  double max_tail_ratio = 0.0;       // max of T(x) / bound
};

ZeroExtensionResult zero_extension_check(const ScalarField& f,
                                         const WhitneyCover& cover, double s,
                                         double p);

struct MultiplierResult {
  bool defined = false;   // false when the plain norm vanishes
  double ratio = 0.0;     // tl_norm(chi_G f) / tl_norm(f)
  double norm_masked = 0.0;
  double norm_plain = 0.0;
  double hardy_part = 0.0;  // the Hardy term of the ext_hardy decomposition
  bool porosity_warning = false;
};

MultiplierResult multiplier_ratio(const ScalarField& f, const Domain& domain,
                                  const NormParams& params, int j_max,
                                  bool porosity_established = true);

}  // namespace hardylab
