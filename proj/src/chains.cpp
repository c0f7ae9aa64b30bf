#include "hardylab/chains.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "hardylab/quadrature.hpp"

namespace hardylab {

int ChainDecomposition::find_target(const CubeKey& q) const {
  for (size_t i = 0; i < targets.size(); ++i)
    if (targets[i] == q) return int(i);
  return -1;
}

namespace {

void build_shadows(ChainDecomposition& d) {
  for (size_t t = 0; t < d.chains.size(); ++t)
    for (const CubeKey& r : d.chains[t]) d.shadows[r].push_back(int(t));
}

void measure_tau_and_levels(ChainDecomposition& d) {
  d.tau = 0;
  d.per_level_max = 0;
  std::unordered_map<int, int> per_level;
  for (size_t t = 0; t < d.chains.size(); ++t) {
    per_level.clear();
    int target_level = d.targets[t].level;
    for (const CubeKey& r : d.chains[t]) {
      d.tau = std::max(d.tau, r.level - target_level);
      d.per_level_max = std::max(d.per_level_max, ++per_level[r.level]);
    }
  }
}

void measure_shadow_radius(ChainDecomposition& d) {
  const SetOracle& boundary = d.domain.boundary();
  double worst = 0.0;
  for (const auto& [r, members] : d.shadows) {
    Vec2 yr = boundary.nearest_point(r.center());
    double lr = r.side();
    for (int t : members) {
      const CubeKey& q = d.targets[t];
      worst = std::max(worst, q.box().max_distance(yr) / lr);
    }
  }
  d.shadow_radius_C = worst;
}

}  // namespace

ChainDecomposition build_john_chains(const WhitneyCover& cover,
                                     std::optional<Vec2> center) {
  if (cover.size() == 0)
    throw Error(ErrorKind::InvalidArgument, "empty cover");
  if (!cover.domain().is_bounded())
    throw Error(ErrorKind::InvalidArgument,
                "john chains need a bounded domain");

  const auto& cubes = cover.cubes();
  size_t n = cubes.size();

  // Adjacency: dilated cubes with positive overlap area. Whitney neighbours
  // differ by a bounded number of levels, so candidates come from nearby
  // indices at nearby levels.
  std::vector<std::vector<std::pair<int, double>>> adj(n);  // (node, weight)
  for (size_t i = 0; i < n; ++i) {
    const CubeKey& q = cubes[i].key;
    Box dq = q.dilated();
    for (int lvl = std::max(0, q.level - 3);
         lvl <= std::min(cover.j_max(), q.level + 3); ++lvl) {
      double side = std::ldexp(1.0, -lvl);
      int64_t x0 = int64_t(std::floor(dq.lo.x / side)) - 1;
      int64_t x1 = int64_t(std::floor(dq.hi.x / side)) + 1;
      int64_t y0 = int64_t(std::floor(dq.lo.y / side)) - 1;
      int64_t y1 = int64_t(std::floor(dq.hi.y / side)) + 1;
      for (int64_t ix = x0; ix <= x1; ++ix)
        for (int64_t iy = y0; iy <= y1; ++iy) {
          int jn = cover.find(CubeKey{lvl, ix, iy});
          if (jn < 0 || size_t(jn) <= i) continue;
          const CubeKey& r = cubes[jn].key;
          if (overlap_area(dq, r.dilated()) > 0.0) {
            double w = std::exp2(double(std::max(q.level, r.level)));
            adj[i].push_back({jn, w});
            adj[jn].push_back({int(i), w});
          }
        }
    }
  }

  // Root cube: contains `center` when given, else maximal boundary distance.
  int root_id = -1;
  if (center) {
    root_id = cover.find_containing(*center);
    if (root_id < 0)
      throw Error(ErrorKind::InvalidArgument,
                  "center is not inside any cover cube");
  } else {
    double best = -1.0;
    for (size_t i = 0; i < n; ++i)
      if (cubes[i].dist_center > best) {
        best = cubes[i].dist_center;
        root_id = int(i);
      }
  }

  // Shortest paths; the priority queue tie-breaks on node id, and cover
  // order is sorted, so the tree is deterministic.
  std::vector<double> distv(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  distv[root_id] = 0.0;
  pq.push({0.0, root_id});
  while (!pq.empty()) {
    auto [dv, u] = pq.top();
    pq.pop();
    if (dv > distv[u]) continue;
    for (auto [v, w] : adj[u]) {
      double cand = dv + w;
      if (cand < distv[v]) {
        distv[v] = cand;
        parent[v] = u;
        pq.push({cand, v});
      }
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (std::isinf(distv[i]))
      throw Error(ErrorKind::Resolution,
                  "Whitney adjacency graph is disconnected at this j_max");

  ChainDecomposition d(cover.domain());
  d.kind = ChainDecomposition::Kind::John;
  d.root = cubes[root_id].key;
  d.j_max = cover.j_max();
  d.targets.reserve(n);
  d.chains.reserve(n);
  d.overlap_c = std::numeric_limits<double>::infinity();
  d.beta_proxy = 0.0;
  for (size_t t = 0; t < n; ++t) {
    std::vector<CubeKey> chain;
    for (int u = int(t); u >= 0; u = parent[u]) chain.push_back(cubes[u].key);
    std::reverse(chain.begin(), chain.end());
    double arclen = 0.0;
    for (size_t i = 1; i < chain.size(); ++i) {
      Box a = chain[i - 1].dilated(), b = chain[i].dilated();
      double ratio = overlap_area(a, b) / std::max(a.area(), b.area());
      if (ratio <= 0.0)
        throw Error(ErrorKind::InvariantViolation,
                    "consecutive chain cubes have no dilated overlap");
      d.overlap_c = std::min(d.overlap_c, ratio);
      arclen += dist(chain[i - 1].center(), chain[i].center());
    }
    if (chain.size() > 1)
      d.beta_proxy =
          std::max(d.beta_proxy, arclen / cubes[t].dist_center);
    d.targets.push_back(cubes[t].key);
    d.chains.push_back(std::move(chain));
  }
  if (n == 1) d.overlap_c = 1.0;

  build_shadows(d);
  measure_tau_and_levels(d);
  measure_shadow_radius(d);
  return d;
}

ChainDecomposition build_dyadic_chains(const WhitneyCover& cover) {
  const Domain& dom = cover.domain();
  double diam_bdry = dom.boundary_diameter();
  if (diam_bdry <= 0.0)
    throw Error(ErrorKind::Setup,
                "dyadic chains need a boundary with positive diameter");

  ChainDecomposition d(dom);
  d.kind = ChainDecomposition::Kind::Dyadic;
  d.j_max = cover.j_max();
  d.gamma = 7.0 * std::sqrt(2.0);
  d.small_threshold = diam_bdry;

  // Small Whitney cubes must share one level-0 ancestor Q0.
  bool have_root = false;
  for (const WhitneyCube& wc : cover.cubes()) {
    if (wc.key.side() > diam_bdry) continue;
    CubeKey q0 = wc.key.ancestor_at(0);
    if (!have_root) {
      d.root = q0;
      have_root = true;
    } else if (!(q0 == d.root)) {
      throw Error(ErrorKind::Setup,
                  "normalization failed: small Whitney cubes do not share a "
                  "single level-0 dyadic cube");
    }
  }
  if (!have_root)
    throw Error(ErrorKind::Setup, "no small Whitney cubes at this resolution");
  if (!d.root.box().expanded(1e-12).contains(dom.boundary().bounding_box()))
    throw Error(ErrorKind::Setup, "normalization failed: dG not inside Q0");
  if (!dom.is_bounded()) {
    // The enumerated cover is window-truncated; small Whitney cubes of an
    // unbounded domain can sit up to 4 diam(Q) from the boundary, so the
    // whole reach of the largest small side must fit inside Q0.
    double largest = std::exp2(std::floor(std::log2(diam_bdry)));
    double reach = 4.0 * std::sqrt(2.0) * largest + largest;
    Box need = dom.boundary().bounding_box().expanded(reach);
    if (!d.root.box().expanded(1e-12).contains(need))
      throw Error(ErrorKind::Setup,
                  "normalization failed: small Whitney cubes of the unbounded "
                  "domain reach outside Q0");
  }

  const SetOracle& boundary = dom.boundary();
  for (const WhitneyCube& wc : cover.cubes()) {
    if (wc.key.side() > diam_bdry) continue;
    std::vector<CubeKey> chain;
    chain.reserve(wc.key.level + 1);
    for (int j = 0; j <= wc.key.level; ++j) {
      CubeKey r = wc.key.ancestor_at(j);
      // Membership in C_{dG,gamma}: gamma^-1 dist(x_R, dG) <= l(R) <= 1.
      if (boundary.distance(r.center()) > d.gamma * r.side() + 1e-12)
        throw Error(ErrorKind::InvariantViolation,
                    "dyadic chain cube outside the near-boundary family");
      chain.push_back(r);
    }
    d.targets.push_back(wc.key);
    d.chains.push_back(std::move(chain));
  }

  build_shadows(d);
  measure_tau_and_levels(d);
  measure_shadow_radius(d);
  d.overlap_c = 1.0;  // parent/child dilations always overlap

  // Shadow containment is exact by ancestry; assert it anyway.
  for (const auto& [r, members] : d.shadows)
    for (int t : members)
      if (!r.contains(d.targets[t]))
        throw Error(ErrorKind::InvariantViolation,
                    "shadow member not contained in its chain cube");
  return d;
}

ChainConditionsReport verify_chain_conditions(const ChainDecomposition& d,
                                              double s, double p) {
  double n = 2.0;
  if (!(s > 0) || !(p > 1) || s * p >= n)
    throw Error(ErrorKind::InvalidArgument, "need 0 < s < n/p (sp < n)");
  ChainConditionsReport rep;
  rep.tau = d.tau;
  rep.per_level_max = d.per_level_max;

  double exponent = n - s * p;
  double sigma = 0.0;
  for (const auto& [r, members] : d.shadows) {
    int j = r.level;
    double sum = 0.0;
    for (int t : members) {
      int k = d.targets[t].level;
      if (k < j - d.tau)
        throw Error(ErrorKind::InvariantViolation,
                    "shadow member below the tau band");
      sum += std::exp2(double(j - k) * exponent) *
             std::pow(double(d.tau + 1 + k - j), p);
    }
    sigma = std::max(sigma, sum);
  }
  rep.sigma = sigma;

  auto dim = d.domain.known_aikawa_dim();
  rep.eps_margin =
      dim ? (n - s * p - *dim) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

std::pair<double, double> telescoping_gap(const ScalarField& f,
                                          const ChainDecomposition& d,
                                          const CubeKey& q, int k, int g) {
  if (d.kind != ChainDecomposition::Kind::Dyadic)
    throw Error(ErrorKind::InvalidArgument,
                "telescoping_gap expects a dyadic decomposition");
  int t = d.find_target(q);
  if (t < 0)
    throw Error(ErrorKind::Lookup, "cube is not a target of the decomposition");

  LocalPolynomial pq = project_polynomial(f, q.box(), k, g);
  LocalPolynomial p0 = project_polynomial(f, d.root.box(), k, g);
  double lhs = 0.0;
  tensor_gauss(q.box(), g, [&](Vec2 x, double) {
    lhs = std::max(lhs, std::abs(pq(x) - p0(x)));
  });

  Kahan rhs;
  for (const CubeKey& r : d.chains[t])
    rhs.add(local_approx_error(f, r.box(), k, 1.0, g));
  return {lhs, rhs.value()};
}

}  // namespace hardylab
