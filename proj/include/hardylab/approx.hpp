#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hardylab/dyadic.hpp"
#include "hardylab/field.hpp"

namespace hardylab {

// ---------------------------------------------------------------------------
// Local polynomial approximation: L2(Q) projections onto polynomials of total
// degree < k in an orthonormal shifted-Legendre basis. The L2 projection is
// the near-best approximant for every L^u, which is all the downstream
// inequalities need.
// ---------------------------------------------------------------------------

// Basis sizes: k=0 -> 0 (P_{-1} = {0}), k=1 -> 1, k=2 -> 3.
int poly_space_dim(int k);

class LocalPolynomial {
 public:
  LocalPolynomial(Box cube, int k, std::vector<double> coeffs)
      : cube_(cube), k_(k), coeffs_(std::move(coeffs)) {}

  double operator()(Vec2 p) const;
  const Box& cube() const { return cube_; }
  int degree_bound() const { return k_ - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  Box cube_;
  int k_;
  std::vector<double> coeffs_;
};

// L2(Q)-orthogonal projection of f onto P_{k-1}, tensor Gauss of order g per
// axis. k = 0 returns the zero polynomial.
LocalPolynomial project_polynomial(const ScalarField& f, const Box& cube, int k,
                                   int g = 4);

// Normalized local approximation error (avg_Q |f - P|^u)^(1/u) with the L2
// projection as P; u = infinity takes the max over quadrature nodes.
double local_approx_error(const ScalarField& f, const Box& cube, int k,
                          double u, int g = 4);
constexpr double kUInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Norm parameters
// ---------------------------------------------------------------------------

struct NormParams {
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;  // infinity() for the sup form
  int k = 1;       // defaults to floor(s) + 1
  double u = 2.0;  // defaults to min(p, q); u = p whenever q >= p
  int g = 4;

  static NormParams make(double s, double p, double q);
  void validate() const;
  bool q_inf() const { return std::isinf(q); }
};

// ---------------------------------------------------------------------------
// Region for discrete norms: a set of same-level finest cells.
// ---------------------------------------------------------------------------

struct Region {
  int level = 0;
  // Full dyadic-aligned box (cells are implicit; norms descend the quadtree
  // and prune support-free subtrees), or an explicit finest-cell list.
  bool is_box = false;
  Box box;
  std::vector<CubeKey> cells;

  // All level-`level` cells of a dyadic-aligned box.
  static Region from_box(const Box& box, int level);
  // Level-`level` descendants of every cover cube.
  static Region from_cover(const WhitneyCover& cover, int level);
  double measure() const {
    if (is_box) return box.area();
    return cells.empty() ? 0.0 : cells.size() * cells[0].box().area();
  }
};

// ---------------------------------------------------------------------------
// Discrete Triebel-Lizorkin norm surrogate: the t-integral over (0,1] becomes
// dyadic scales t = 2^-j, j = j_min..region.level, with weight log 2, and
// Q(x,t) becomes the level-j dyadic ancestor of x. F is then constant on
// finest cells, and the position integral is the exact cell sum.
// ---------------------------------------------------------------------------

struct TlNorm {
  double lp_term = 0.0;       // ||f||_{L^p(region)}
  double profile_term = 0.0;  // ||F||_{L^p(region)}
  double total() const { return lp_term + profile_term; }
};

TlNorm tl_norm(const ScalarField& f, const NormParams& params,
               const Region& region, int j_min = 0);

// ---------------------------------------------------------------------------
// Fractional Sobolev (Gagliardo) seminorm over the cover region, organized as
// a sum over Whitney-cube pairs. Far pairs use tensor Gauss; near and diagonal
// pairs are subdivided down to the finest cube side h, where the |x-y| < eps
// core is excluded and Richardson-extrapolated over eps in {h, h/2}.
// ---------------------------------------------------------------------------

struct FracDetail {
  double excluded_core = 0.0;  // extrapolated core contribution (reported)
  size_t pair_evals = 0;
};

double frac_seminorm(const ScalarField& f, const WhitneyCover& cover, double s,
                     double p, FracDetail* detail = nullptr);

// One geometry pass, many smoothness exponents: returns the seminorm for each
// s in s_list (shared quadrature nodes; only the kernel power differs).
std::vector<double> frac_seminorm_multi(const ScalarField& f,
                                        const WhitneyCover& cover,
                                        std::span<const double> s_list, double p,
                                        FracDetail* detail = nullptr);

}  // namespace hardylab
