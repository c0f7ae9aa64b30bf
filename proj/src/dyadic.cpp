#include "hardylab/dyadic.hpp"

#include <algorithm>
#include <cmath>

namespace hardylab {

WhitneyCover::WhitneyCover(Domain domain, int j_max,
                           std::vector<WhitneyCube> cubes,
                           double resolved_measure, double uncovered_bound)
    : domain_(std::move(domain)),
      j_max_(j_max),
      cubes_(std::move(cubes)),
      resolved_measure_(resolved_measure),
      uncovered_bound_(uncovered_bound) {
  index_.reserve(cubes_.size() * 2);
  for (size_t i = 0; i < cubes_.size(); ++i)
    index_.emplace(cubes_[i].key, int(i));
}

int WhitneyCover::find(const CubeKey& k) const {
  auto it = index_.find(k);
  return it == index_.end() ? -1 : it->second;
}

int WhitneyCover::find_containing(Vec2 p) const {
  for (int j = 0; j <= j_max_; ++j) {
    auto it = index_.find(CubeKey::containing(p, j));
    if (it != index_.end()) return it->second;
  }
  return -1;
}

namespace {

struct BuildState {
  const Domain* domain;
  int j_max;
  std::vector<WhitneyCube> cubes;
  Kahan resolved;
  Kahan dropped;
};

void descend(BuildState& st, const CubeKey& q) {
  Vec2 c = q.center();
  auto [d, in] = st.domain->distance_inside(c);
  double diam = q.diam();
  if (!in) {
    if (d >= diam / 2) return;  // cube entirely in the complement
  } else if (d - diam / 2 >= diam) {
    // Lower-bounded dist(Q, dG) >= diam(Q): accept as a Whitney cube.
    st.cubes.push_back({q, d});
    st.resolved.add(q.side() * q.side());
    return;
  }
  if (q.level == st.j_max) {
    st.dropped.add(q.side() * q.side());
    return;
  }
  for (int i = 0; i < 4; ++i) descend(st, q.child(i));
}

}  // namespace

WhitneyCover whitney_cover(const Domain& domain, int j_max) {
  if (j_max < 0 || j_max > 14)
    throw Error(ErrorKind::InvalidArgument,
                "j_max must be in [0, 14], got " + std::to_string(j_max));
  Box window = domain.cover_window();  // throws Setup if not normalized

  BuildState st{&domain, j_max, {}, {}, {}};
  int64_t x0 = int64_t(std::floor(window.lo.x)), x1 = int64_t(std::ceil(window.hi.x));
  int64_t y0 = int64_t(std::floor(window.lo.y)), y1 = int64_t(std::ceil(window.hi.y));
  for (int64_t ix = x0; ix < x1; ++ix)
    for (int64_t iy = y0; iy < y1; ++iy) descend(st, CubeKey{0, ix, iy});

  if (st.cubes.empty())
    throw Error(ErrorKind::Resolution,
                "empty Whitney cover: domain is nowhere thicker than the "
                "finest cube at j_max=" + std::to_string(j_max));

  // Post-hoc verification of the two-sided bound on Q*: the four corners of
  // the dilated cube and its center. Violations are a build failure.
  for (const WhitneyCube& wc : st.cubes) {
    Box d = wc.key.dilated();
    double diam = wc.key.diam();
    for (Vec2 p : {d.lo, Vec2{d.hi.x, d.lo.y}, d.hi, Vec2{d.lo.x, d.hi.y},
                   d.center()}) {
      double r = domain.boundary_distance(p) / diam;
      if (r < 0.75 - 1e-12 || r > 6.0 + 1e-12)
        throw Error(ErrorKind::InvariantViolation,
                    "Whitney bound violated on a dilated cube: ratio " +
                        format_double(r));
    }
  }

  std::sort(st.cubes.begin(), st.cubes.end(),
            [](const WhitneyCube& a, const WhitneyCube& b) {
              if (a.key.level != b.key.level) return a.key.level < b.key.level;
              if (a.key.ix != b.key.ix) return a.key.ix < b.key.ix;
              return a.key.iy < b.key.iy;
            });
  return WhitneyCover(domain, j_max, std::move(st.cubes), st.resolved.value(),
                      st.dropped.value());
}

WhitneyReport verify_whitney(const WhitneyCover& cover, int samples_per_cube,
                             uint64_t seed) {
  if (cover.size() == 0)
    throw Error(ErrorKind::InvalidArgument, "empty cover");
  WhitneyReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  Rng rng(seed);
  const Domain& dom = cover.domain();
  for (const WhitneyCube& wc : cover.cubes()) {
    Box d = wc.key.dilated();
    double diam = wc.key.diam();
    for (int s = 0; s < samples_per_cube; ++s) {
      double r = dom.boundary_distance(rng.point_in(d)) / diam;
      rep.min_ratio = std::min(rep.min_ratio, r);
      rep.max_ratio = std::max(rep.max_ratio, r);
      if (r < 0.75 - 1e-12 || r > 6.0 + 1e-12) ++rep.violations;
    }
  }

  // Exact disjointness: dyadic cubes have disjoint interiors unless nested.
  rep.disjoint = true;
  for (const WhitneyCube& wc : cover.cubes()) {
    for (CubeKey a = wc.key; a.level > 0;) {
      a = a.parent();
      if (cover.find(a) >= 0) {
        rep.disjoint = false;
        break;
      }
    }
    if (!rep.disjoint) break;
  }

  // Overlap of the dilated family over random probe points.
  Box window = dom.cover_window();
  int probes = 10000;
  rep.overlap_histogram.assign(32, 0);
  for (int i = 0; i < probes; ++i) {
    Vec2 p = rng.point_in(window);
    int count = 0;
    for (int j = 0; j <= cover.j_max(); ++j) {
      double side = std::ldexp(1.0, -j);
      double m = side / 16.0;
      int64_t lo_x = int64_t(std::floor((p.x - m) / side));
      int64_t hi_x = int64_t(std::floor((p.x + m) / side));
      int64_t lo_y = int64_t(std::floor((p.y - m) / side));
      int64_t hi_y = int64_t(std::floor((p.y + m) / side));
      for (int64_t ix = lo_x; ix <= hi_x; ++ix)
        for (int64_t iy = lo_y; iy <= hi_y; ++iy) {
          int id = cover.find(CubeKey{j, ix, iy});
          if (id >= 0 && cover.cubes()[id].key.dilated().contains(p)) ++count;
        }
    }
    if (count >= int(rep.overlap_histogram.size()))
      rep.overlap_histogram.resize(count + 1, 0);
    ++rep.overlap_histogram[count];
    rep.max_overlap = std::max(rep.max_overlap, count);
  }
  return rep;
}

namespace {

void near_boundary_descend(const SetOracle& S, double gamma, int j_max,
                           const CubeKey& q, std::vector<CubeKey>& out) {
  double d = S.distance(q.center());
  double side = q.side();
  if (d <= gamma * side) out.push_back(q);
  if (q.level >= j_max) return;
  // A descendant at level j' > level can qualify only if
  // dist(x_Q', S) <= gamma 2^-(level+1); prune with the box lower bound.
  if (d - q.diam() / 2 > gamma * side / 2) return;
  for (int i = 0; i < 4; ++i)
    near_boundary_descend(S, gamma, j_max, q.child(i), out);
}

}  // namespace

NearBoundaryFamily near_boundary_cubes(std::shared_ptr<const SetOracle> S,
                                       double gamma, int j_max) {
  if (gamma <= 0)
    throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  if (j_max < 0 || j_max > 14)
    throw Error(ErrorKind::InvalidArgument, "j_max must be in [0, 14]");
  NearBoundaryFamily fam;
  fam.set = S;
  fam.gamma = gamma;
  fam.j_max = j_max;

  // Level-0 roots: every unit cube whose center could be within gamma of S.
  Box bb = S->bounding_box();
  int64_t x0 = int64_t(std::floor(bb.lo.x - gamma - 1));
  int64_t x1 = int64_t(std::ceil(bb.hi.x + gamma + 1));
  int64_t y0 = int64_t(std::floor(bb.lo.y - gamma - 1));
  int64_t y1 = int64_t(std::ceil(bb.hi.y + gamma + 1));
  for (int64_t ix = x0; ix < x1; ++ix)
    for (int64_t iy = y0; iy < y1; ++iy)
      near_boundary_descend(*S, gamma, j_max, CubeKey{0, ix, iy}, fam.cubes);

  std::sort(fam.cubes.begin(), fam.cubes.end(),
            [](const CubeKey& a, const CubeKey& b) {
              if (a.level != b.level) return a.level < b.level;
              if (a.ix != b.ix) return a.ix < b.ix;
              return a.iy < b.iy;
            });
  return fam;
}

}  // namespace hardylab
