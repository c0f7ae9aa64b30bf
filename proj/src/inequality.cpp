#include "hardylab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hardylab/parallel.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab {

// --------------------------------------------------------------------------
// Weighted ball integrals
// --------------------------------------------------------------------------

namespace {

struct BallState {
  const SetOracle* set;
  Vec2 x;
  double r;
  std::span<const double> exponents;
  const BallIntegralOptions* opts;
  double stop_near;    // stop refining toward E below this side
  double stop_sphere;  // stop refining toward the sphere below this side
  int n_shells;

  std::vector<double> values;                // per exponent
  std::vector<double> collar;                // per exponent
  std::vector<std::vector<double>> shells;   // [exponent][shell]
};

int shell_of(const BallState& st, double d) {
  if (d <= 0.0) return st.n_shells - 1;
  int k = int(std::floor(std::log2(st.r / d)));
  return std::clamp(k, 0, st.n_shells - 1);
}

void ball_cell(BallState& st, const Box& cell) {
  Vec2 c = cell.center();
  double half = cell.diam() / 2;
  double to_x = dist(c, st.x);
  if (to_x - half >= st.r) return;  // entirely outside the ball

  double d = st.set->distance(c);
  double side = cell.width();
  bool straddles = std::abs(to_x - st.r) < half;
  bool near_set = d - half < st.opts->refine_factor * side;
  bool refine = (straddles && side > st.stop_sphere) ||
                (near_set && side > st.stop_near);
  if (refine) {
    double mx = (cell.lo.x + cell.hi.x) / 2, my = (cell.lo.y + cell.hi.y) / 2;
    Box kids[4] = {{cell.lo, {mx, my}},
                   {{mx, cell.lo.y}, {cell.hi.x, my}},
                   {{cell.lo.x, my}, {mx, cell.hi.y}},
                   {{mx, my}, cell.hi}};
    for (const Box& kid : kids) ball_cell(st, kid);
    return;
  }

  size_t ne = st.exponents.size();
  int shell = shell_of(st, d);
  if (near_set && side <= st.stop_near) {
    // Unresolved cell hugging the set: center estimate, tracked as collar.
    if (d <= 0.0) return;  // measure-zero center hit
    double area = cell.area();
    double ld = std::log(d);
    for (size_t t = 0; t < ne; ++t) {
      double v = area * std::exp(st.exponents[t] * ld);
      st.values[t] += v;
      st.collar[t] += v;
      st.shells[t][shell] += v;
    }
    return;
  }

  // Regular leaf: tensor Gauss with the ball indicator.
  tensor_gauss(cell, st.opts->gauss, [&](Vec2 y, double w) {
    if (dist(y, st.x) > st.r) return;
    double dy = st.set->distance(y);
    if (dy <= 0.0) return;
    double ld = std::log(dy);
    for (size_t t = 0; t < ne; ++t)
      st.values[t] += w * std::exp(st.exponents[t] * ld);
  });
  double area = cell.area();
  double ld = d > 0 ? std::log(d) : 0.0;
  for (size_t t = 0; t < ne; ++t)
    st.shells[t][shell] += d > 0 ? area * std::exp(st.exponents[t] * ld) : 0.0;
}

}  // namespace

// Least-squares slope of log(shell sum) against the shell index over
// [k_lo, k_hi]; returns false when fewer than min_shells nonzero shells.
static bool shell_slope_fit(const std::vector<double>& shells, int k_lo,
                            int k_hi, int min_shells, double* slope) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = k_lo; k <= k_hi && k < int(shells.size()); ++k) {
    double v = shells[k];
    if (v <= 0.0) continue;
    double lx = double(k), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < min_shells) return false;
  double denom = m * sxx - sx * sx;
  *slope = denom != 0 ? (m * sxy - sx * sy) / denom : 0.0;
  return true;
}

std::vector<BallIntegralEval> ball_weighted_integral(
    const SetOracle& E, Vec2 x, double r, std::span<const double> exponents,
    const BallIntegralOptions& opts) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  BallState st;
  st.set = &E;
  st.x = x;
  st.r = r;
  st.exponents = exponents;
  st.opts = &opts;
  st.stop_near = r * std::ldexp(1.0, -opts.max_depth);
  st.stop_sphere = r * std::ldexp(1.0, -std::min(opts.max_depth, 11));
  st.n_shells = opts.max_depth + 2;
  st.values.assign(exponents.size(), 0.0);
  st.collar.assign(exponents.size(), 0.0);
  st.shells.assign(exponents.size(), std::vector<double>(st.n_shells, 0.0));

  ball_cell(st, Box{{x.x - r, x.y - r}, {x.x + r, x.y + r}});

  // Divergence detection: regression of log shell sums against the shell
  // index. Shells are restricted to the window above the set's primitive
  // scale (below it a finite approximant changes character); when that
  // window is too short to fit, the full shell range is used.
  double prim = E.primitive_scale();
  int k_lo = 1;
  int k_hi = st.n_shells - 2;
  int k_hi_window = prim > 0.0
                        ? std::min(k_hi, int(std::floor(std::log2(
                                       std::max(r / (4.0 * prim), 1e-9)))))
                        : k_hi;

  std::vector<BallIntegralEval> out(exponents.size());
  for (size_t t = 0; t < exponents.size(); ++t) {
    BallIntegralEval& ev = out[t];
    ev.value = st.values[t];
    ev.collar_bound = st.collar[t];
    double slope = 0.0;
    bool fit = shell_slope_fit(st.shells[t], k_lo, k_hi_window,
                               opts.min_shells, &slope) ||
               shell_slope_fit(st.shells[t], k_lo, k_hi, opts.min_shells,
                               &slope);
    if (fit) {
      ev.shell_slope = slope;
      ev.divergent = slope >= opts.divergence_slope;
    }
  }
  return out;
}

double aikawa_integral(const SetOracle& E, Vec2 x, double r, double s,
                       const BallIntegralOptions& opts) {
  double n = 2.0;
  if (!(s > 0.0) || s > n)
    throw Error(ErrorKind::InvalidArgument, "need 0 < s <= n");
  double e = s - n;
  auto ev =
      ball_weighted_integral(E, x, r, std::span<const double>(&e, 1), opts);
  return ev[0].divergent ? std::numeric_limits<double>::infinity()
                         : ev[0].value;
}

// --------------------------------------------------------------------------
// Dimension estimation
// --------------------------------------------------------------------------

namespace {

int count_boxes(const SetOracle& E, const Box& root, double scale) {
  // Cells whose circumdisk meets E, counted by quadtree descent: a child
  // satisfying the proxy forces the parent to satisfy it too.
  struct Item {
    Box b;
  };
  std::vector<Item> stack{{root}};
  int count = 0;
  while (!stack.empty()) {
    Box b = stack.back().b;
    stack.pop_back();
    if (E.distance(b.center()) > b.diam() / 2) continue;
    if (b.width() <= scale * 1.0000001) {
      ++count;
      continue;
    }
    double mx = (b.lo.x + b.hi.x) / 2, my = (b.lo.y + b.hi.y) / 2;
    stack.push_back({{b.lo, {mx, my}}});
    stack.push_back({{{mx, b.lo.y}, {b.hi.x, my}}});
    stack.push_back({{{b.lo.x, my}, {mx, b.hi.y}}});
    stack.push_back({{{mx, my}, b.hi}});
  }
  return count;
}

}  // namespace

double box_counting_dimension(const SetOracle& E,
                              std::span<const double> scales) {
  if (scales.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "need at least two scales");
  Box bb = E.bounding_box();
  double size = std::max({bb.width(), bb.height(), 1e-12});
  Box root{bb.lo, bb.lo + Vec2{size, size}};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double scale : scales) {
    // Snap to the dyadic grid of the root so cells tile it exactly.
    int k = std::max(0, int(std::round(std::log2(size / scale))));
    double snapped = size * std::ldexp(1.0, -k);
    int n = count_boxes(E, root, snapped);
    double lx = std::log(1.0 / snapped), ly = std::log(double(std::max(n, 1)));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double m = double(scales.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

DimensionReport estimate_aikawa_dimension(const SetOracle& E,
                                          std::span<const Vec2> probes,
                                          std::span<const double> radii,
                                          std::span<const double> s_grid,
                                          const DimensionOptions& opts) {
  if (probes.empty())
    throw Error(ErrorKind::InvalidArgument, "empty probe set");
  if (radii.empty() || s_grid.empty())
    throw Error(ErrorKind::InvalidArgument, "empty radii or s grid");

  DimensionReport rep;
  rep.set_name = E.name();
  rep.probes.assign(probes.begin(), probes.end());
  rep.radii.assign(radii.begin(), radii.end());
  rep.s_grid.assign(s_grid.begin(), s_grid.end());
  rep.ratio_threshold = opts.ratio_threshold;

  std::vector<double> exps(s_grid.size());
  for (size_t t = 0; t < s_grid.size(); ++t) exps[t] = s_grid[t] - 2.0;

  size_t np = probes.size(), nr = radii.size(), ns = s_grid.size();
  std::vector<std::vector<BallIntegralEval>> evals(np * nr);
  parallel_chunks(np * nr, [&](size_t i) {
    evals[i] = ball_weighted_integral(E, probes[i / nr], radii[i % nr], exps,
                                      opts.ball);
  });

  rep.admissible.assign(ns, true);
  for (size_t t = 0; t < ns; ++t) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (size_t i = 0; i < np * nr; ++i) {
      const BallIntegralEval& ev = evals[i][t];
      double r = radii[i % nr];
      double ratio = ev.value / std::pow(r, s_grid[t]);
      rep.table.push_back({int(i / nr), r, s_grid[t],
                           ev.divergent
                               ? std::numeric_limits<double>::infinity()
                               : ev.value,
                           ratio});
      if (ev.divergent) rep.admissible[t] = false;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (!(hi / lo <= opts.ratio_threshold)) rep.admissible[t] = false;
  }

  // First grid point from which admissibility persists upward.
  int first = int(ns);
  for (int t = int(ns) - 1; t >= 0; --t) {
    if (!rep.admissible[t]) break;
    first = t;
  }
  if (first == int(ns)) {
    rep.dim_estimate = 2.0;
    rep.dim_bracket_lo = rep.s_grid.back();
  } else {
    rep.dim_estimate = rep.s_grid[first];
    rep.dim_bracket_lo = first > 0 ? rep.s_grid[first - 1] : 0.0;
  }

  // Box-counting cross-check over the same scale window.
  std::vector<double> scales;
  for (double r : radii) scales.push_back(r / 2);
  rep.box_counting_dim = box_counting_dimension(E, scales);
  return rep;
}

// --------------------------------------------------------------------------
// Porosity
// --------------------------------------------------------------------------

std::optional<double> porosity_constant(const SetOracle& S,
                                        std::span<const double> scales,
                                        int samples, uint64_t seed) {
  if (scales.empty() || samples <= 0)
    throw Error(ErrorKind::InvalidArgument, "need scales and samples");
  std::vector<Vec2> on = S.sample_points(samples, seed);
  Rng rng(seed ^ 0x5eedULL);
  const double sqrt_n = std::sqrt(2.0);

  for (double kappa : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    bool all_ok = true;
    for (double r : scales) {
      if (!all_ok) break;
      for (int i = 0; i < samples && all_ok; ++i) {
        // Cube Q(x, r) has side 2r; x alternates between points on S and
        // jittered near-S points.
        Vec2 x = on[i];
        if (i % 2 == 1) x = x + Vec2{rng.uniform(-r, r), rng.uniform(-r, r)};
        int m = 2 * int(kappa) + 1;
        bool found = false;
        for (int a = 0; a < m && !found; ++a)
          for (int b = 0; b < m && !found; ++b) {
            Vec2 y{x.x - r + 2.0 * r * a / (m - 1),
                   x.y - r + 2.0 * r * b / (m - 1)};
            if (S.distance(y) >= sqrt_n * r / kappa) found = true;
          }
        if (!found) all_ok = false;
      }
    }
    if (all_ok) return kappa;
  }
  return std::nullopt;
}

// --------------------------------------------------------------------------
// Hardy functional
// --------------------------------------------------------------------------

std::vector<double> hardy_functional_multi(const ScalarField& f,
                                           const WhitneyCover& cover,
                                           std::span<const double> s_list,
                                           double p, HardyDetail* detail) {
  for (double s : s_list)
    if (!(s >= 0.0) || s * p >= 2.0)
      throw Error(ErrorKind::InvalidArgument, "need sp < n");
  if (cover.uncovered_measure_bound() > cover.resolved_measure())
    throw Error(ErrorKind::Resolution,
                "cover collar dominates the resolved region");

  size_t ns = s_list.size();
  const Domain& dom = cover.domain();
  bool compact = f.compact_support();
  Box supp = f.support_hint();

  size_t n = cover.size();
  size_t block = 64;
  size_t n_blocks = (n + block - 1) / block;
  std::vector<std::vector<double>> partial(n_blocks,
                                           std::vector<double>(ns, 0.0));
  std::vector<double> maxf(n_blocks, 0.0);
  parallel_chunks(n_blocks, [&](size_t bi) {
    auto& acc = partial[bi];
    size_t lo = bi * block, hi = std::min(n, lo + block);
    for (size_t i = lo; i < hi; ++i) {
      const WhitneyCube& wc = cover.cubes()[i];
      if (compact && !wc.key.box().intersects(supp)) continue;
      tensor_gauss(wc.key.box(), 4, [&](Vec2 y, double w) {
        double fv = f(y);
        if (fv == 0.0) return;
        double fp = std::pow(std::abs(fv), p);
        maxf[bi] = std::max(maxf[bi], fp);
        double d = dom.boundary_distance(y);
        double ld = std::log(d);
        for (size_t t = 0; t < ns; ++t)
          acc[t] += w * fp * std::exp(-s_list[t] * p * ld);
      });
    }
  });

  std::vector<double> out(ns, 0.0);
  double fmax = 0.0;
  for (size_t bi = 0; bi < n_blocks; ++bi) {
    fmax = std::max(fmax, maxf[bi]);
    for (size_t t = 0; t < ns; ++t) out[t] += partial[bi][t];
  }
  if (detail) {
    double h = std::ldexp(1.0, -cover.j_max());
    double worst = 0.0;
    for (double s : s_list)
      worst = std::max(worst, std::pow(0.5 * h, -s * p));
    detail->collar_bound = cover.uncovered_measure_bound() * fmax * worst;
  }
  for (double& v : out) v = std::pow(v, 1.0 / p);
  return out;
}

double hardy_functional(const ScalarField& f, const WhitneyCover& cover,
                        double s, double p, HardyDetail* detail) {
  double arr[1] = {s};
  return hardy_functional_multi(f, cover, std::span<const double>(arr, 1), p,
                                detail)[0];
}

// L^p norm of f over the cover region.
static double lp_norm_on_cover(const ScalarField& f, const WhitneyCover& cover,
                               double p) {
  bool compact = f.compact_support();
  Box supp = f.support_hint();
  double vp = block_reduce(cover.size(), 64, [&](size_t i, Kahan& acc) {
    const WhitneyCube& wc = cover.cubes()[i];
    if (compact && !wc.key.box().intersects(supp)) return;
    tensor_gauss(wc.key.box(), 4, [&](Vec2 y, double w) {
      double fv = f(y);
      if (fv != 0.0) acc.add(w * std::pow(std::abs(fv), p));
    });
  });
  return std::pow(vp, 1.0 / p);
}

// --------------------------------------------------------------------------
// Hardy sweep
// --------------------------------------------------------------------------

std::vector<ScalarField> make_test_corpus(const Domain& domain, uint64_t seed) {
  const SetOracle& bdry = domain.boundary();
  double diam = std::max(domain.boundary_diameter(), 1e-3);
  double radii[3] = {diam / 4.0, diam / 8.0, diam / 16.0};

  // Boundary samples pulled toward the window interior.
  std::vector<Vec2> pts = bdry.sample_points(64, seed);
  Box inner{{0.15, 0.15}, {0.85, 0.85}};
  std::vector<Vec2> usable;
  for (Vec2 q : pts)
    if (inner.contains(q)) usable.push_back(q);
  if (usable.size() < 3) usable = pts;

  Rng rng(seed ^ 0xc0ffeeULL);
  Vec2 on1 = usable[0];
  Vec2 on2 = usable[usable.size() / 2];
  double ang1 = rng.uniform(0.0, 2 * M_PI), ang2 = rng.uniform(0.0, 2 * M_PI);
  Vec2 near1 = on1 + (diam / 10.0) * Vec2{std::cos(ang1), std::sin(ang1)};
  Vec2 near2 = on2 + (diam / 10.0) * Vec2{std::cos(ang2), std::sin(ang2)};
  // Off-boundary: the best of a few random interior candidates.
  Vec2 off{0.5, 0.5};
  double best = domain.boundary_distance(off);
  for (int i = 0; i < 64; ++i) {
    Vec2 c = rng.point_in(Box{{0.2, 0.2}, {0.8, 0.8}});
    double d = domain.boundary_distance(c);
    if (domain.inside(c) && d > best) {
      best = d;
      off = c;
    }
  }

  std::vector<ScalarField> corpus;
  const char* center_tag[5] = {"on1", "on2", "near1", "near2", "off"};
  Vec2 centers[5] = {on1, on2, near1, near2, off};
  for (int c = 0; c < 5; ++c)
    for (int sidx = 0; sidx < 3; ++sidx) {
      ScalarField b = bump_field(centers[c], radii[sidx]);
      corpus.push_back(ScalarField(
          [b](Vec2 p) { return b(p); }, b.support_hint(), true,
          Smoothness::Smooth,
          std::string("bump-") + center_tag[c] + "-s" + std::to_string(sidx)));
    }
  corpus.push_back(coordinate_field(0));
  corpus.push_back(coordinate_field(1));
  return corpus;
}

HardyReport hardy_ratio_sweep(const Domain& domain,
                              std::span<const ScalarField> corpus,
                              std::span<const HardyGridPoint> grid,
                              std::span<const int> j_max_list,
                              const HardySweepOptions& opts) {
  if (grid.empty() || j_max_list.empty() || corpus.empty())
    throw Error(ErrorKind::InvalidArgument, "empty sweep inputs");
  for (const HardyGridPoint& gp : grid)
    if (!(gp.s > 0) || !(gp.p > 1) || gp.s * gp.p >= 2.0)
      throw Error(ErrorKind::InvalidArgument, "grid point violates 0<s<n/p");

  HardyReport rep;
  rep.growth_threshold = opts.growth_threshold;

  // Group grid points with q == p by p so one multi-s pass serves them all.
  std::map<double, std::vector<size_t>> qp_groups;  // p -> grid indices
  std::vector<size_t> generic;                      // q != p grid indices
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].q == grid[i].p)
      qp_groups[grid[i].p].push_back(i);
    else
      generic.push_back(i);
  }

  // sup ratio indexed by (grid index, j index).
  std::vector<std::vector<double>> sup(grid.size(),
                                       std::vector<double>(j_max_list.size(), 0.0));

  for (size_t ji = 0; ji < j_max_list.size(); ++ji) {
    WhitneyCover cover = whitney_cover(domain, j_max_list[ji]);
    for (auto& [p, idxs] : qp_groups) {
      std::vector<double> s_list;
      for (size_t gi : idxs) s_list.push_back(grid[gi].s);
      for (const ScalarField& f : corpus) {
        std::vector<double> lhs = hardy_functional_multi(f, cover, s_list, p);
        double lp = lp_norm_on_cover(f, cover, p);
        std::vector<double> semi = frac_seminorm_multi(f, cover, s_list, p);
        for (size_t t = 0; t < idxs.size(); ++t) {
          double rhs = lp + semi[t];
          double ratio = rhs > 0 ? lhs[t] / rhs
                                 : std::numeric_limits<double>::quiet_NaN();
          rep.entries.push_back({grid[idxs[t]].s, p, p, j_max_list[ji], f.id(),
                                 lhs[t], rhs, ratio});
          if (rhs > 0) sup[idxs[t]][ji] = std::max(sup[idxs[t]][ji], ratio);
        }
      }
    }
    for (size_t gi : generic) {
      const HardyGridPoint& gp = grid[gi];
      NormParams np = NormParams::make(gp.s, gp.p, gp.q);
      Region region = Region::from_cover(cover, j_max_list[ji]);
      for (const ScalarField& f : corpus) {
        double lhs = hardy_functional(f, cover, gp.s, gp.p);
        TlNorm tn = tl_norm(f, np, region, opts.tl_j_min);
        double rhs = tn.total();
        double ratio = rhs > 0 ? lhs / rhs
                               : std::numeric_limits<double>::quiet_NaN();
        rep.entries.push_back(
            {gp.s, gp.p, gp.q, j_max_list[ji], f.id(), lhs, rhs, ratio});
        if (rhs > 0) sup[gi][ji] = std::max(sup[gi][ji], ratio);
      }
    }
  }

  for (size_t gi = 0; gi < grid.size(); ++gi)
    for (size_t ji = 0; ji < j_max_list.size(); ++ji)
      rep.sup_rows.push_back({grid[gi].s, grid[gi].p, grid[gi].q,
                              j_max_list[ji], sup[gi][ji]});

  // Growth from the coarsest to the finest resolution, per grid point.
  for (size_t gi = 0; gi < grid.size(); ++gi) {
    double first = sup[gi].front(), last = sup[gi].back();
    rep.growth.push_back(first > 0 ? last / first
                                   : std::numeric_limits<double>::quiet_NaN());
    rep.growth_s.push_back(grid[gi].s);
  }

  // Dichotomy bracket over grid points sorted by s (first (p,q) group).
  std::vector<size_t> order(grid.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return grid[a].s < grid[b].s; });
  rep.bracket_lo = 0.0;
  rep.bracket_hi = 0.0;
  for (size_t oi = 0; oi < order.size(); ++oi) {
    size_t gi = order[oi];
    if (rep.growth[gi] >= opts.growth_threshold) {
      rep.bracket_hi = grid[gi].s;
      rep.bracket_lo = oi > 0 ? grid[order[oi - 1]].s : 0.0;
      break;
    }
  }
  return rep;
}

// --------------------------------------------------------------------------
// Homogeneity
// --------------------------------------------------------------------------

HomogeneityResult homogeneity_slope(const ScalarField& f,
                                    const NormParams& params,
                                    std::span<const double> radii, int j_max) {
  if (radii.size() < 3)
    throw Error(ErrorKind::InvalidArgument, "need at least 3 radii");
  HomogeneityResult res;
  for (double r : radii) {
    if (!(r > 0 && r <= 1))
      throw Error(ErrorKind::InvalidArgument, "radii must lie in (0, 1]");
    // Both the evaluation window and the finest level track the dilation;
    // the discrete norm then transforms exactly like the continuous one and
    // the fitted exponent is clean. Radii snap to powers of two.
    int i = std::max(0, int(std::round(std::log2(1.0 / r))));
    double rs = std::exp2(double(-i));
    int level = std::min(13, j_max + i);
    Region region = Region::from_box(Box{{0, 0}, {rs, rs}}, level);
    ScalarField g = scaled_field(f, rs);
    res.norms.push_back(tl_norm(g, params, region).profile_term);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t idx = 0; idx < radii.size(); ++idx) {
    if (!(res.norms[idx] > 0))
      throw Error(ErrorKind::InvalidArgument,
                  "undefined slope: a scaled norm vanishes");
    double snapped = std::exp2(-std::round(std::log2(1.0 / radii[idx])));
    double lx = std::log(1.0 / snapped), ly = std::log(res.norms[idx]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double m = double(radii.size());
  res.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return res;
}

// --------------------------------------------------------------------------
// Pointwise boundary estimates
// --------------------------------------------------------------------------

std::pair<double, double> bump_dimension_test(const Domain& domain, Vec2 x,
                                              double r, double s, double p) {
  if (!domain.complement_null())
    throw Error(ErrorKind::Setup,
                "bump test needs a domain with Lebesgue-null complement");
  if (!(r > 0 && r <= 1))
    throw Error(ErrorKind::InvalidArgument, "need 0 < r <= 1");
  double e = -s * p;
  auto lhs_ev = ball_weighted_integral(domain.boundary(), x, r / 2,
                                       std::span<const double>(&e, 1));
  auto cal_ev = ball_weighted_integral(domain.boundary(), x, 0.5,
                                       std::span<const double>(&e, 1));
  double c = cal_ev[0].value;  // calibrated at r = 1
  return {lhs_ev[0].value, c * std::pow(r, 2.0 - s * p)};
}

std::pair<double, double> reverse_holder_dist(const Domain& domain, Vec2 x,
                                              double r, double s, double p) {
  double exps[2] = {-s * p, -s};
  auto ev = ball_weighted_integral(domain.boundary(), x, r,
                                   std::span<const double>(exps, 2));
  double area = M_PI * r * r;
  double lhs = std::pow(ev[0].value / area, 1.0 / p);
  double rhs = ev[1].value / area;
  return {lhs, rhs};
}

// --------------------------------------------------------------------------
// reverse_holder_cubes: exact cell-sum evaluation
// --------------------------------------------------------------------------

std::pair<double, double> reverse_holder_cubes(std::span<const CubeKey> cubes,
                                               std::span<const double> weights,
                                               double p, double q) {
  if (cubes.size() != weights.size())
    throw Error(ErrorKind::InvalidArgument, "cubes/weights size mismatch");
  if (!(p > 1) || !(q > 1) || std::isinf(p) || std::isinf(q))
    throw Error(ErrorKind::InvalidArgument, "p, q must be in (1, inf)");
  for (double a : weights)
    if (a < 0)
      throw Error(ErrorKind::InvalidArgument, "weights must be nonnegative");
  if (cubes.empty()) return {0.0, 0.0};

  // Coordinate compression over cube edges.
  std::vector<double> xs, ys;
  for (const CubeKey& c : cubes) {
    Box b = c.box();
    xs.push_back(b.lo.x);
    xs.push_back(b.hi.x);
    ys.push_back(b.lo.y);
    ys.push_back(b.hi.y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  size_t nx = xs.size() - 1, ny = ys.size() - 1;

  // 2-D difference arrays for sum(a) and sum(a^q) per cell.
  std::vector<double> da((nx + 1) * (ny + 1), 0.0), dq((nx + 1) * (ny + 1), 0.0);
  auto xi = [&](double v) {
    return size_t(std::lower_bound(xs.begin(), xs.end(), v) - xs.begin());
  };
  auto yi = [&](double v) {
    return size_t(std::lower_bound(ys.begin(), ys.end(), v) - ys.begin());
  };
  for (size_t i = 0; i < cubes.size(); ++i) {
    if (weights[i] == 0.0) continue;
    Box b = cubes[i].box();
    size_t x0 = xi(b.lo.x), x1 = xi(b.hi.x);
    size_t y0 = yi(b.lo.y), y1 = yi(b.hi.y);
    double aq = std::pow(weights[i], q);
    da[x0 * (ny + 1) + y0] += weights[i];
    da[x1 * (ny + 1) + y0] -= weights[i];
    da[x0 * (ny + 1) + y1] -= weights[i];
    da[x1 * (ny + 1) + y1] += weights[i];
    dq[x0 * (ny + 1) + y0] += aq;
    dq[x1 * (ny + 1) + y0] -= aq;
    dq[x0 * (ny + 1) + y1] -= aq;
    dq[x1 * (ny + 1) + y1] += aq;
  }
  // Prefix sums in place.
  for (size_t i = 0; i <= nx; ++i)
    for (size_t j = 1; j <= ny; ++j) {
      da[i * (ny + 1) + j] += da[i * (ny + 1) + j - 1];
      dq[i * (ny + 1) + j] += dq[i * (ny + 1) + j - 1];
    }
  for (size_t i = 1; i <= nx; ++i)
    for (size_t j = 0; j <= ny; ++j) {
      da[i * (ny + 1) + j] += da[(i - 1) * (ny + 1) + j];
      dq[i * (ny + 1) + j] += dq[(i - 1) * (ny + 1) + j];
    }

  Kahan lhs_p, rhs_p;
  for (size_t i = 0; i < nx; ++i)
    for (size_t j = 0; j < ny; ++j) {
      double suma = da[i * (ny + 1) + j];
      double sumq = dq[i * (ny + 1) + j];
      if (suma <= 0.0) continue;
      double area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
      lhs_p.add(area * std::pow(suma, p));
      rhs_p.add(area * std::pow(sumq, p / q));
    }
  return {std::pow(lhs_p.value(), 1.0 / p), std::pow(rhs_p.value(), 1.0 / p)};
}

// --------------------------------------------------------------------------
// Zero extension
// --------------------------------------------------------------------------

namespace {

// Integral of |x-y|^(-2-sp) over box \ B(x, d), by recursive subdivision of
// boxes straddling the sphere.
double kernel_outside_ball(Vec2 x, double d, const Box& b, double kexp,
                           double min_side) {
  double lo = b.distance(x), hi = b.max_distance(x);
  if (hi <= d) return 0.0;  // fully inside the excluded ball
  if (lo >= d || b.width() <= min_side) {
    // Fully outside, or fine enough for the node-level indicator.
    int g = lo >= 2 * d ? 2 : 3;
    double acc = 0.0;
    tensor_gauss(b, g, [&](Vec2 y, double w) {
      double r2 = (x - y).norm2();
      if (r2 < d * d) return;
      acc += w * std::exp(kexp * std::log(r2));
    });
    return acc;
  }
  double mx = (b.lo.x + b.hi.x) / 2, my = (b.lo.y + b.hi.y) / 2;
  Box kids[4] = {{b.lo, {mx, my}},
                 {{mx, b.lo.y}, {b.hi.x, my}},
                 {{b.lo.x, my}, {mx, b.hi.y}},
                 {{mx, my}, b.hi}};
  double acc = 0.0;
  for (const Box& kid : kids)
    acc += kernel_outside_ball(x, d, kid, kexp, min_side);
  return acc;
}

}  // namespace

double complement_kernel_integral(const WhitneyCover& cover, Vec2 x, double s,
                                  double p) {
  double sp = s * p;
  double kexp = -(2.0 + sp) / 2.0;
  double d = cover.domain().boundary_distance(x);
  if (!(d > 0))
    throw Error(ErrorKind::InvalidArgument, "x must lie inside the domain");
  double bound = 2.0 * M_PI * std::pow(d, -sp) / sp;
  double g_int = 0.0;
  double min_side = std::max(d / 256.0, 1e-9);
  for (const WhitneyCube& other : cover.cubes())
    g_int += kernel_outside_ball(x, d, other.key.box(), kexp, min_side);
  return bound - g_int;
}

ZeroExtensionResult zero_extension_check(const ScalarField& f,
                                         const WhitneyCover& cover, double s,
                                         double p) {
  if (!(s > 0 && s < 1))
    throw Error(ErrorKind::InvalidArgument,
                "zero extension bound needs 0 < s < 1");
  if (!(p > 1) || std::isinf(p))
    throw Error(ErrorKind::InvalidArgument, "p must be in (1, inf)");

  ZeroExtensionResult res;
  double semi = frac_seminorm(f, cover, s, p);
  res.interior_seminorm_p = std::pow(semi, p);
  res.hardy_term_p = std::pow(hardy_functional(f, cover, s, p), p);

  const Domain& dom = cover.domain();
  double sp = s * p;
  double kexp = -(2.0 + sp) / 2.0;  // applied to log(r^2)
  bool compact = f.compact_support();
  Box supp = f.support_hint();

  // Cross term: 2 integral over G of |f|^p T(x), with
  // T(x) = 2 pi d^(-sp)/(sp) - integral over G \ B(x, d).
  size_t n = cover.size();
  std::vector<double> cross_part((n + 31) / 32, 0.0);
  std::vector<double> ratio_part((n + 31) / 32, 0.0);
  parallel_chunks(cross_part.size(), [&](size_t c) {
    double acc = 0.0, worst = 0.0;
    size_t lo = c * 32, hi = std::min(n, lo + 32);
    for (size_t i = lo; i < hi; ++i) {
      const WhitneyCube& wc = cover.cubes()[i];
      if (compact && !wc.key.box().intersects(supp)) continue;
      tensor_gauss(wc.key.box(), 4, [&](Vec2 xq, double w) {
        double fv = f(xq);
        if (fv == 0.0) return;
        double d = dom.boundary_distance(xq);
        double bound = 2.0 * M_PI * std::pow(d, -sp) / sp;
        double g_int = 0.0;
        double min_side = std::max(d / 256.0, 1e-9);
        for (const WhitneyCube& other : cover.cubes()) {
          Box ob = other.key.box();
          if (ob.distance(xq) >= d || ob.max_distance(xq) > d)
            g_int += kernel_outside_ball(xq, d, ob, kexp, min_side);
        }
        double t_val = bound - g_int;
        if (t_val < 0.0) t_val = 0.0;
        worst = std::max(worst, (bound - g_int) / bound);
        acc += 2.0 * w * std::pow(std::abs(fv), p) * t_val;
      });
    }
    cross_part[c] = acc;
    ratio_part[c] = worst;
  });
  double cross = 0.0;
  res.max_tail_ratio = 0.0;
  for (size_t c = 0; c < cross_part.size(); ++c) {
    cross += cross_part[c];
    res.max_tail_ratio = std::max(res.max_tail_ratio, ratio_part[c]);
  }
  res.ext_seminorm_p = res.interior_seminorm_p + cross;
  res.tail_bound_ok = res.max_tail_ratio <= 1.0 + 1e-9;
  return res;
}

// --------------------------------------------------------------------------
// Multiplier
// --------------------------------------------------------------------------

MultiplierResult multiplier_ratio(const ScalarField& f, const Domain& domain,
                                  const NormParams& params, int j_max,
                                  bool porosity_established) {
  MultiplierResult res;
  res.porosity_warning = !porosity_established;
  Region region = Region::from_box(Box{{0, 0}, {1, 1}}, j_max);
  ScalarField masked = masked_field(f, domain);
  TlNorm plain = tl_norm(f, params, region);
  TlNorm chi = tl_norm(masked, params, region);
  res.norm_plain = plain.total();
  res.norm_masked = chi.total();
  if (res.norm_plain <= 0.0) {
    res.defined = false;
    return res;
  }
  res.defined = true;
  res.ratio = res.norm_masked / res.norm_plain;
  WhitneyCover cover = whitney_cover(domain, j_max);
  res.hardy_part = hardy_functional(masked, cover, params.s, params.p);
  return res;
}

}  // namespace hardylab
