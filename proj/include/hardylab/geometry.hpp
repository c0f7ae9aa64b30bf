#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hardylab/util.hpp"

namespace hardylab {

// ---------------------------------------------------------------------------
// SetOracle: a closed set E with an exact Euclidean distance function.
// Domain boundaries, Cantor dusts, points and segments all implement it, so
// the dimension/porosity estimators run on any of them.
// ---------------------------------------------------------------------------

class SetOracle {
 public:
  virtual ~SetOracle() = default;
  virtual double distance(Vec2 p) const = 0;
  // A point of the set realizing the distance.
  virtual Vec2 nearest_point(Vec2 p) const = 0;
  virtual Box bounding_box() const = 0;
  // Smallest geometric feature; estimates are scale-valid only for r above
  // this (below it a finite-level approximant is smooth).
  virtual double primitive_scale() const = 0;
  // Deterministic points lying on the set.
  virtual std::vector<Vec2> sample_points(int n, uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

class PointSet final : public SetOracle {
 public:
  explicit PointSet(std::vector<Vec2> pts);
  double distance(Vec2 p) const override;
  Vec2 nearest_point(Vec2 p) const override;
  Box bounding_box() const override { return bbox_; }
  double primitive_scale() const override { return 0.0; }
  std::vector<Vec2> sample_points(int n, uint64_t seed) const override;
  std::string name() const override { return "points"; }
  const std::vector<Vec2>& points() const { return pts_; }

 private:
  std::vector<Vec2> pts_;
  Box bbox_;
};

struct Segment {
  Vec2 a, b;
  Box bbox() const {
    return {{std::min(a.x, b.x), std::min(a.y, b.y)},
            {std::max(a.x, b.x), std::max(a.y, b.y)}};
  }
  double length() const { return dist(a, b); }
};

// Segment set with a BVH; exact distance queries in ~log(n).
class SegmentSet final : public SetOracle {
 public:
  explicit SegmentSet(std::vector<Segment> segs, std::string name = "segments");
  double distance(Vec2 p) const override;
  Vec2 nearest_point(Vec2 p) const override;
  Box bounding_box() const override { return bbox_; }
  double primitive_scale() const override { return min_len_; }
  std::vector<Vec2> sample_points(int n, uint64_t seed) const override;
  std::string name() const override { return name_; }
  const std::vector<Segment>& segments() const { return segs_; }

 private:
  struct Node {
    Box box;
    int left = -1, right = -1;  // children, or leaf range below
    int begin = 0, end = 0;
  };
  int build(std::vector<int>& ids, int begin, int end);

  std::vector<Segment> segs_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
  Box bbox_;
  double min_len_ = 0.0;
  std::string name_;
};

// Boundary of the level-m approximation of the Cantor dust C_l x C_l scaled
// to a square of the given width. Distance is computed by descending the
// 4-ary construction tree with box lower bounds; that matches the brute
// force over all 4^m squares exactly.
class DustBoundarySet final : public SetOracle {
 public:
  DustBoundarySet(double ratio, int level, double width, Vec2 origin);
  double distance(Vec2 p) const override;
  Vec2 nearest_point(Vec2 p) const override;
  Box bounding_box() const override;
  double primitive_scale() const override;
  std::vector<Vec2> sample_points(int n, uint64_t seed) const override;
  std::string name() const override { return "cantor-dust"; }

  bool in_dust(Vec2 p) const;  // inside the closed union of squares
  std::vector<Box> squares() const;  // all 4^m squares (test support)
  double ratio() const { return ratio_; }
  int level() const { return level_; }

 private:
  double descend(Vec2 p, int depth, Vec2 lo, double size, double best) const;

  double ratio_;
  int level_;
  double width_;
  Vec2 origin_;
};

// ---------------------------------------------------------------------------
// Domain: open set G with boundary oracle, inside test and cover window.
// All domains are normalized to live inside the unit square so the dyadic
// lattice anchored at the origin has level-0 cubes of side 1.
// ---------------------------------------------------------------------------

class Domain {
 public:
  class Impl;

  int dimension() const { return 2; }
  double boundary_distance(Vec2 p) const;
  bool inside(Vec2 p) const;
  std::pair<double, bool> distance_inside(Vec2 p) const;

  const SetOracle& boundary() const;
  std::shared_ptr<const SetOracle> boundary_ptr() const;
  // Region covered by the dyadic machinery; always within [0,1]^2.
  Box cover_window() const;
  double boundary_diameter() const;
  std::optional<double> known_aikawa_dim() const;
  bool complement_null() const;  // the limit object's complement is Lebesgue-null
  bool is_bounded() const;
  const std::string& name() const;

  explicit Domain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<const Impl> impl_;
};

// Simple closed polygon; even-odd inside rule, distance = min over edges.
Domain make_polygon_domain(std::vector<Vec2> vertices,
                           const std::string& name = "polygon");

// Koch snowflake approximant at the given construction level, base side
// `side`, centroid at `center`. Defaults fit it well inside the unit square.
Domain make_koch_snowflake(int level, double side = 0.75,
                           Vec2 center = {0.5, 0.5});

// G = R^2 minus the level-m Cantor dust with ratio lambda, dust scaled to a
// square of side `width` whose lower-left corner sits so the dust is centered
// at `center`.
Domain make_cantor_dust_complement(double ratio, int level, double width = 1.0,
                                   Vec2 center = {0.5, 0.5});

// G = R^2 minus a single point (degenerate boundary; used for closed forms).
Domain make_point_complement(Vec2 p);

}  // namespace hardylab
