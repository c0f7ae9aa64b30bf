#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "hardylab/approx.hpp"
#include "hardylab/dyadic.hpp"

namespace hardylab {

// ---------------------------------------------------------------------------
// Chain decompositions. John chains connect every Whitney cube to a central
// cube through the adjacency graph of dilated cubes; dyadic chains connect
// every small Whitney cube to the unit cube Q0 through its dyadic ancestors.
// ---------------------------------------------------------------------------

struct ChainDecomposition {
  enum class Kind { John, Dyadic };

  Kind kind = Kind::John;
  Domain domain;
  CubeKey root;
  int j_max = 0;

  std::vector<CubeKey> targets;               // one chain per target cube
  std::vector<std::vector<CubeKey>> chains;   // chains[t]: root ... target
  std::unordered_map<CubeKey, std::vector<int>, CubeKeyHash> shadows;

  // Measured constants.
  int tau = 0;               // condition (1): l(Q) <= 2^tau l(R)
  int per_level_max = 0;     // condition (2): chain cubes per level
  double overlap_c = 0.0;    // john: min consecutive dilated-overlap ratio
  double shadow_radius_C = 0; // smallest C with shadows inside B(y_R, C l(R))
  double beta_proxy = 0.0;   // max chain-arclength / target-boundary-distance
  double gamma = 0.0;        // dyadic: 7 sqrt(n)
  double small_threshold = 0.0;  // dyadic: diam(dG)

  int find_target(const CubeKey& q) const;

  explicit ChainDecomposition(Domain d) : domain(std::move(d)) {}
};

// Chains through the Whitney adjacency graph (edges where dilated cubes
// overlap with positive area), produced by a shortest path from the root
// with edge weight 1 / side(smaller cube). The root is the cube containing
// `center` if given, otherwise a cube of maximal boundary distance.
ChainDecomposition build_john_chains(const WhitneyCover& cover,
                                     std::optional<Vec2> center = std::nullopt);

// Ancestor chains for every small Whitney cube (side <= diam dG), all of
// which must share the level-0 ancestor Q0; every chain cube must satisfy
// the near-boundary predicate with gamma = 7 sqrt(n).
ChainDecomposition build_dyadic_chains(const WhitneyCover& cover);

struct ChainConditionsReport {
  int tau = 0;
  int per_level_max = 0;
  double sigma = 0.0;       // sup over R of the weighted shadow sum
  double eps_margin = 0.0;  // n - sp - dim estimate of dG (NaN if unknown)
};

ChainConditionsReport verify_chain_conditions(const ChainDecomposition& decomp,
                                              double s, double p);

// Proposition-style telescoping data for one small cube: lhs = sup over
// quadrature nodes on Q of |P_{k,Q} f - P_{k,Q0} f|, rhs = sum over the chain
// of E_k(f, R)_{L^1}. The caller checks lhs <= C rhs.
std::pair<double, double> telescoping_gap(const ScalarField& f,
                                          const ChainDecomposition& decomp,
                                          const CubeKey& q, int k, int g = 4);

}  // namespace hardylab
