#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hardylab/geometry.hpp"
#include "hardylab/util.hpp"

namespace hardylab {

// ---------------------------------------------------------------------------
// Dyadic cubes on the lattice anchored at the origin: level j >= 0 has side
// 2^-j, the cube (j, ix, iy) is [ix 2^-j, (ix+1) 2^-j] x [iy 2^-j, (iy+1) 2^-j].
// Indices may be negative (near-boundary families reach outside [0,1]^2).
// ---------------------------------------------------------------------------

struct CubeKey {
  int level = 0;
  int64_t ix = 0;
  int64_t iy = 0;

  double side() const { return std::ldexp(1.0, -level); }
  double diam() const { return side() * std::sqrt(2.0); }
  Vec2 corner() const { return {double(ix) * side(), double(iy) * side()}; }
  Vec2 center() const {
    double s = side();
    return {(double(ix) + 0.5) * s, (double(iy) + 0.5) * s};
  }
  Box box() const {
    double s = side();
    return {{double(ix) * s, double(iy) * s},
            {double(ix + 1) * s, double(iy + 1) * s}};
  }
  // (9/8)Q, the dilation used throughout.
  Box dilated() const {
    double m = side() / 16.0;
    return box().expanded(m);
  }

  CubeKey parent() const { return {level - 1, ix >> 1, iy >> 1}; }
  CubeKey child(int i) const {
    return {level + 1, 2 * ix + (i & 1), 2 * iy + ((i >> 1) & 1)};
  }
  CubeKey ancestor_at(int anc_level) const {
    int d = level - anc_level;
    return {anc_level, ix >> d, iy >> d};
  }
  bool contains(const CubeKey& q) const {
    if (q.level < level) return false;
    int d = q.level - level;
    return (q.ix >> d) == ix && (q.iy >> d) == iy;
  }
  bool operator==(const CubeKey&) const = default;

  // Exact packing for hashing; valid for level <= 20, |index| < 2^21.
  uint64_t pack() const {
    return (uint64_t(uint32_t(level)) << 44) |
           (uint64_t((ix + (int64_t(1) << 21)) & 0x3fffff) << 22) |
           uint64_t((iy + (int64_t(1) << 21)) & 0x3fffff);
  }
  static CubeKey containing(Vec2 p, int level) {
    double s = std::ldexp(1.0, level);
    return {level, int64_t(std::floor(p.x * s)), int64_t(std::floor(p.y * s))};
  }
};

struct CubeKeyHash {
  size_t operator()(const CubeKey& k) const {
    uint64_t x = k.pack();
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return size_t(x);
  }
};

// ---------------------------------------------------------------------------
// Whitney cover
// ---------------------------------------------------------------------------

struct WhitneyCube {
  CubeKey key;
  double dist_center;  // cached dist(x_Q, dG)
};

class WhitneyCover {
 public:
  WhitneyCover(Domain domain, int j_max, std::vector<WhitneyCube> cubes,
               double resolved_measure, double uncovered_bound);

  const Domain& domain() const { return domain_; }
  int j_max() const { return j_max_; }
  const std::vector<WhitneyCube>& cubes() const { return cubes_; }
  size_t size() const { return cubes_.size(); }
  double resolved_measure() const { return resolved_measure_; }
  double uncovered_measure_bound() const { return uncovered_bound_; }

  // Index of the cover cube with this key, or -1.
  int find(const CubeKey& k) const;
  // Index of the cover cube containing p (cover cubes are disjoint), or -1.
  int find_containing(Vec2 p) const;

 private:
  Domain domain_;
  int j_max_;
  std::vector<WhitneyCube> cubes_;
  double resolved_measure_;
  double uncovered_bound_;
  std::unordered_map<CubeKey, int, CubeKeyHash> index_;
};

// Maximal dyadic cubes Q inside G whose (lower-bounded) distance to dG is at
// least diam(Q), enumerated top-down and truncated at j_max. The two-sided
// Whitney bound (3/4) diam <= dist <= 6 diam on Q* is verified post-hoc on
// deterministic sample points; a violation is a build failure.
WhitneyCover whitney_cover(const Domain& domain, int j_max);

struct WhitneyReport {
  double min_ratio = 0.0;      // min over samples of dist / diam
  double max_ratio = 0.0;      // max over samples of dist / diam
  bool disjoint = false;       // pairwise-disjoint interiors (exact)
  int violations = 0;          // sample points breaking the two-sided bound
  int max_overlap = 0;         // max count of dilated cubes over probe points
  std::vector<int> overlap_histogram;
};

WhitneyReport verify_whitney(const WhitneyCover& cover, int samples_per_cube,
                             uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Near-boundary family C_{S,gamma}: dyadic cubes with
// dist(x_Q, S) <= gamma * l(Q) and l(Q) <= 1, truncated at level j_max.
// ---------------------------------------------------------------------------

struct NearBoundaryFamily {
  std::shared_ptr<const SetOracle> set;
  double gamma = 0.0;
  int j_max = 0;
  std::vector<CubeKey> cubes;

  bool member_predicate(const CubeKey& q) const {
    return q.level >= 0 && set->distance(q.center()) <= gamma * q.side();
  }
};

NearBoundaryFamily near_boundary_cubes(std::shared_ptr<const SetOracle> S,
                                       double gamma, int j_max);

}  // namespace hardylab
