#include "hardylab/approx.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hardylab/parallel.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab {

int poly_space_dim(int k) {
  if (k < 0 || k > 2)
    throw Error(ErrorKind::InvalidArgument,
                "polynomial order k must be 0, 1 or 2");
  return k == 0 ? 0 : (k == 1 ? 1 : 3);
}

namespace {

// Orthonormal basis for P_{k-1} on a cube under the normalized measure:
// {1}, {1, sqrt3 xi, sqrt3 eta} with xi, eta in [-1, 1].
inline void basis_eval(const Box& cube, int k, Vec2 p, double* out) {
  if (k == 0) return;
  out[0] = 1.0;
  if (k == 1) return;
  double xi = 2.0 * (p.x - cube.lo.x) / cube.width() - 1.0;
  double eta = 2.0 * (p.y - cube.lo.y) / cube.height() - 1.0;
  out[1] = std::sqrt(3.0) * xi;
  out[2] = std::sqrt(3.0) * eta;
}

void require_quadrature(int k, int g) {
  if (g < (k + 1) / 2 + 1)
    throw Error(ErrorKind::Quadrature,
                "gauss order " + std::to_string(g) + " insufficient for k=" +
                    std::to_string(k));
}

// Composite depth so the quadrature grid resolves the field's support scale
// on cubes much larger than the support (a concentrated bump on a big cube
// is invisible to a plain tensor rule).
int composite_depth(const Box& cube, const ScalarField& f) {
  if (!f.compact_support()) return 0;
  const Box& s = f.support_hint();
  double feature = std::max(std::min(s.width(), s.height()),
                            cube.width() / 64.0);
  double ratio = cube.width() / feature;
  if (ratio <= 1.0) return 0;
  return std::min(6, int(std::ceil(std::log2(ratio))));
}

// Tensor Gauss on each subcell of the 2^m x 2^m split. skip_zero skips
// subcells outside the field's support (for integrands vanishing with f).
template <typename F>
void composite_gauss(const Box& cube, int g, int m, const ScalarField& f,
                     bool skip_zero, F&& fn) {
  if (m == 0) {
    tensor_gauss(cube, g, fn);
    return;
  }
  int n = 1 << m;
  double w = cube.width() / n, h = cube.height() / n;
  Box supp = f.support_hint();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Box sub{{cube.lo.x + i * w, cube.lo.y + j * h},
              {cube.lo.x + (i + 1) * w, cube.lo.y + (j + 1) * h}};
      if (skip_zero && !sub.intersects(supp)) continue;
      tensor_gauss(sub, g, fn);
    }
}

}  // namespace

double LocalPolynomial::operator()(Vec2 p) const {
  double b[3];
  basis_eval(cube_, k_, p, b);
  double v = 0.0;
  for (size_t i = 0; i < coeffs_.size(); ++i) v += coeffs_[i] * b[i];
  return v;
}

LocalPolynomial project_polynomial(const ScalarField& f, const Box& cube, int k,
                                   int g) {
  int dim = poly_space_dim(k);
  require_quadrature(k, g);
  std::vector<double> coeffs(dim, 0.0);
  if (dim > 0) {
    double area = cube.area();
    double b[3];
    composite_gauss(cube, g, composite_depth(cube, f), f, /*skip_zero=*/true,
                    [&](Vec2 p, double w) {
                      double fv = f(p);
                      if (fv == 0.0) return;
                      basis_eval(cube, k, p, b);
                      double wn = w / area;  // normalized measure
                      for (int i = 0; i < dim; ++i) coeffs[i] += wn * fv * b[i];
                    });
  }
  return LocalPolynomial(cube, k, std::move(coeffs));
}

double local_approx_error(const ScalarField& f, const Box& cube, int k,
                          double u, int g) {
  if (!(u >= 1.0))
    throw Error(ErrorKind::InvalidArgument, "u must be in [1, inf]");
  LocalPolynomial proj = project_polynomial(f, cube, k, g);
  double area = cube.area();
  int m = composite_depth(cube, f);
  if (std::isinf(u)) {
    double worst = 0.0;
    composite_gauss(cube, g, m, f, /*skip_zero=*/false, [&](Vec2 p, double) {
      worst = std::max(worst, std::abs(f(p) - proj(p)));
    });
    return worst;
  }
  Kahan acc;
  composite_gauss(cube, g, m, f, /*skip_zero=*/false, [&](Vec2 p, double w) {
    acc.add(w / area * std::pow(std::abs(f(p) - proj(p)), u));
  });
  return std::pow(acc.value(), 1.0 / u);
}

// --------------------------------------------------------------------------
// NormParams
// --------------------------------------------------------------------------

NormParams NormParams::make(double s, double p, double q) {
  NormParams np;
  np.s = s;
  np.p = p;
  np.q = q;
  np.k = int(std::floor(s)) + 1;
  np.u = std::min(p, q);
  np.g = 4;
  np.validate();
  return np;
}

void NormParams::validate() const {
  if (!(s > 0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  if (!(p > 1) || std::isinf(p))
    throw Error(ErrorKind::InvalidArgument, "p must be in (1, inf)");
  if (!(q >= 1)) throw Error(ErrorKind::InvalidArgument, "q must be >= 1");
  if (!(s < k))
    throw Error(ErrorKind::InvalidArgument, "need s < k");
  if (!(u >= 1) || u > std::min(p, q) + 1e-12)
    throw Error(ErrorKind::InvalidArgument, "need 1 <= u <= min(p,q)");
  require_quadrature(k, g);
}

// --------------------------------------------------------------------------
// Region
// --------------------------------------------------------------------------

Region Region::from_box(const Box& box, int level) {
  if (level < 0 || level > 14)
    throw Error(ErrorKind::InvalidArgument, "region level out of range");
  double scale = std::ldexp(1.0, level);
  auto aligned = [&](double v) {
    double t = v * scale;
    return std::abs(t - std::round(t)) < 1e-9;
  };
  if (!aligned(box.lo.x) || !aligned(box.lo.y) || !aligned(box.hi.x) ||
      !aligned(box.hi.y))
    throw Error(ErrorKind::InvalidArgument,
                "region box must be aligned to the level grid");
  Region r;
  r.level = level;
  r.is_box = true;
  r.box = box;
  return r;
}

Region Region::from_cover(const WhitneyCover& cover, int level) {
  Region r;
  r.level = level;
  for (const WhitneyCube& wc : cover.cubes()) {
    if (wc.key.level > level)
      throw Error(ErrorKind::Resolution,
                  "cover is finer than the requested region level");
    int d = level - wc.key.level;
    int64_t n = int64_t(1) << d;
    for (int64_t dx = 0; dx < n; ++dx)
      for (int64_t dy = 0; dy < n; ++dy)
        r.cells.push_back({level, (wc.key.ix << d) + dx, (wc.key.iy << d) + dy});
  }
  return r;
}

// --------------------------------------------------------------------------
// tl_norm
// --------------------------------------------------------------------------

namespace {

// F-profile value from the collected per-level terms 2^{js} E_j.
double profile_from_terms(const std::vector<double>& weighted, bool q_inf,
                          double q) {
  if (q_inf) {
    double m = 0.0;
    for (double t : weighted) m = std::max(m, t);
    return m;
  }
  double sum = 0.0;
  for (double t : weighted) sum += std::pow(t, q);
  return std::pow(std::log(2.0) * sum, 1.0 / q);
}

struct TlDescent {
  const ScalarField* f;
  const NormParams* params;
  int j_min, j_max;
  bool compact;
  Box supp;
  Kahan profile_p;
  Kahan lp_p;
  std::vector<double> terms;  // weighted E-terms along the current path

  void visit(const CubeKey& node) {
    Box b = node.box();
    if (compact && !b.intersects(supp)) {
      // No deeper scale sees the support: F is constant on this subtree and
      // the L^p part vanishes.
      double fq = profile_from_terms(terms, params->q_inf(), params->q);
      profile_p.add(b.area() * std::pow(fq, params->p));
      return;
    }
    size_t pushed = 0;
    if (node.level >= j_min) {
      double e = local_approx_error(*f, b, params->k, params->u, params->g);
      terms.push_back(std::exp2(double(node.level) * params->s) * e);
      pushed = 1;
    }
    if (node.level == j_max) {
      double fq = profile_from_terms(terms, params->q_inf(), params->q);
      profile_p.add(b.area() * std::pow(fq, params->p));
      Kahan local;
      tensor_gauss(b, params->g, [&](Vec2 p, double w) {
        double v = (*f)(p);
        if (v != 0.0) local.add(w * std::pow(std::abs(v), params->p));
      });
      lp_p.add(local.value());
    } else {
      for (int c = 0; c < 4; ++c) visit(node.child(c));
    }
    if (pushed) terms.pop_back();
  }
};

}  // namespace

TlNorm tl_norm(const ScalarField& f, const NormParams& params,
               const Region& region, int j_min) {
  params.validate();
  int j_max = region.level;
  if (j_min < 0 || j_min > j_max)
    throw Error(ErrorKind::InvalidArgument, "bad j_min");

  if (region.is_box) {
    // Quadtree descent over the box; support-free subtrees are finished in
    // one step, so deep levels stay affordable for concentrated fields.
    // Roots are the coarsest dyadic cubes tiling the box, with the scale
    // terms of their strict ancestors pushed first.
    int root_level = j_max;
    for (int l = j_min; l < j_max; ++l) {
      double sc = std::ldexp(1.0, l);
      auto on_grid = [&](double v) {
        double t = v * sc;
        return std::abs(t - std::round(t)) < 1e-9;
      };
      if (on_grid(region.box.lo.x) && on_grid(region.box.lo.y) &&
          on_grid(region.box.hi.x) && on_grid(region.box.hi.y)) {
        root_level = l;
        break;
      }
    }
    TlDescent d;
    d.f = &f;
    d.params = &params;
    d.j_min = j_min;
    d.j_max = j_max;
    d.compact = f.compact_support();
    d.supp = f.support_hint();
    double sc = std::ldexp(1.0, root_level);
    int64_t x0 = int64_t(std::llround(region.box.lo.x * sc));
    int64_t x1 = int64_t(std::llround(region.box.hi.x * sc));
    int64_t y0 = int64_t(std::llround(region.box.lo.y * sc));
    int64_t y1 = int64_t(std::llround(region.box.hi.y * sc));
    for (int64_t ix = x0; ix < x1; ++ix)
      for (int64_t iy = y0; iy < y1; ++iy) {
        CubeKey root{root_level, ix, iy};
        d.terms.clear();
        for (int j = j_min; j < root_level; ++j) {
          double e = local_approx_error(f, root.ancestor_at(j).box(), params.k,
                                        params.u, params.g);
          d.terms.push_back(std::exp2(double(j) * params.s) * e);
        }
        d.visit(root);
      }
    TlNorm out;
    out.profile_term = std::pow(d.profile_p.value(), 1.0 / params.p);
    out.lp_term = std::pow(d.lp_p.value(), 1.0 / params.p);
    return out;
  }

  if (region.cells.empty())
    throw Error(ErrorKind::Resolution, "empty region");

  // Cell-list path: unique ancestor cubes over the level range, then exact
  // cell sums.
  std::unordered_map<CubeKey, int, CubeKeyHash> cube_ids;
  std::vector<CubeKey> cubes;
  for (const CubeKey& cell : region.cells)
    for (int j = j_min; j <= j_max; ++j) {
      CubeKey a = cell.ancestor_at(j);
      if (cube_ids.emplace(a, int(cubes.size())).second) cubes.push_back(a);
    }

  bool compact = f.compact_support();
  Box supp = f.support_hint();
  std::vector<double> errors(cubes.size());
  size_t chunk = 64;
  size_t n_chunks = (cubes.size() + chunk - 1) / chunk;
  parallel_chunks(n_chunks, [&](size_t c) {
    size_t lo = c * chunk, hi = std::min(cubes.size(), lo + chunk);
    for (size_t i = lo; i < hi; ++i) {
      if (compact && !cubes[i].box().intersects(supp))
        errors[i] = 0.0;
      else
        errors[i] = local_approx_error(f, cubes[i].box(), params.k, params.u,
                                       params.g);
    }
  });

  double profile_p = block_reduce(region.cells.size(), 512, [&](size_t i, Kahan& acc) {
    const CubeKey& cell = region.cells[i];
    double fq;
    if (params.q_inf()) {
      fq = 0.0;
      for (int j = j_min; j <= j_max; ++j) {
        double e = errors[cube_ids.at(cell.ancestor_at(j))];
        fq = std::max(fq, e * std::exp2(double(j) * params.s));
      }
    } else {
      double sum = 0.0;
      for (int j = j_min; j <= j_max; ++j) {
        double e = errors[cube_ids.at(cell.ancestor_at(j))];
        sum += std::pow(std::exp2(double(j) * params.s) * e, params.q);
      }
      fq = std::pow(std::log(2.0) * sum, 1.0 / params.q);
    }
    acc.add(cell.box().area() * std::pow(fq, params.p));
  });

  double lp_p = block_reduce(region.cells.size(), 512, [&](size_t i, Kahan& acc) {
    if (compact && !region.cells[i].box().intersects(supp)) return;
    Kahan local;
    tensor_gauss(region.cells[i].box(), params.g, [&](Vec2 p, double w) {
      double v = f(p);
      if (v != 0.0) local.add(w * std::pow(std::abs(v), params.p));
    });
    acc.add(local.value());
  });

  TlNorm out;
  out.profile_term = std::pow(profile_p, 1.0 / params.p);
  out.lp_term = std::pow(lp_p, 1.0 / params.p);
  return out;
}

// --------------------------------------------------------------------------
// Gagliardo seminorm
// --------------------------------------------------------------------------

namespace {

struct CubeQuad {
  std::vector<Vec2> pts;
  std::vector<double> w;
  std::vector<double> fv;
  bool all_zero = true;
};

CubeQuad make_quad(const ScalarField& f, const Box& b, int g) {
  CubeQuad q;
  tensor_gauss(b, g, [&](Vec2 p, double w) {
    q.pts.push_back(p);
    q.w.push_back(w);
    double v = f(p);
    q.fv.push_back(v);
    if (v != 0.0) q.all_zero = false;
  });
  return q;
}

inline double pow_abs(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 1.0) return std::abs(d);
  return std::pow(std::abs(d), p);
}

double box_box_distance(const Box& a, const Box& b) {
  double dx = std::max({a.lo.x - b.hi.x, 0.0, b.lo.x - a.hi.x});
  double dy = std::max({a.lo.y - b.hi.y, 0.0, b.lo.y - a.hi.y});
  return std::hypot(dx, dy);
}

struct FracAccum {
  std::vector<double> main;     // per s
  std::vector<double> core_h;   // per s, exclusion at eps = h
  std::vector<double> core_h2;  // per s, exclusion at eps = h/2
  size_t evals = 0;

  explicit FracAccum(size_t ns) : main(ns, 0.0), core_h(ns, 0.0), core_h2(ns, 0.0) {}
  void merge(const FracAccum& o) {
    for (size_t i = 0; i < main.size(); ++i) {
      main[i] += o.main[i];
      core_h[i] += o.core_h[i];
      core_h2[i] += o.core_h2[i];
    }
    evals += o.evals;
  }
};

struct FracContext {
  const ScalarField* f;
  double p;
  std::vector<double> kernel_exp;  // -(2 + s p) / 2, applied to log(d^2)
  double h;                        // finest cube side
  double sym;                      // 2 for i<j pairs, 1 for self pairs
};

inline void accum_pair_nodes(const FracContext& ctx, const CubeQuad& a,
                             const CubeQuad& b, FracAccum& acc) {
  size_t ns = ctx.kernel_exp.size();
  for (size_t i = 0; i < a.pts.size(); ++i) {
    if (a.fv[i] == 0.0 && b.all_zero) continue;
    for (size_t j = 0; j < b.pts.size(); ++j) {
      double df = a.fv[i] - b.fv[j];
      if (df == 0.0) continue;
      double dx = a.pts[i].x - b.pts[j].x, dy = a.pts[i].y - b.pts[j].y;
      double d2 = dx * dx + dy * dy;
      double m = ctx.sym * a.w[i] * b.w[j] * pow_abs(df, ctx.p);
      double ld = std::log(d2);
      for (size_t t = 0; t < ns; ++t)
        acc.main[t] += m * std::exp(ctx.kernel_exp[t] * ld);
    }
  }
  acc.evals += a.pts.size() * b.pts.size();
}

void core_eval(const FracContext& ctx, const Box& a, const Box& b,
               FracAccum& acc) {
  CubeQuad qa = make_quad(*ctx.f, a, 3);
  CubeQuad qb = make_quad(*ctx.f, b, 3);
  if (qa.all_zero && qb.all_zero) return;
  size_t ns = ctx.kernel_exp.size();
  // Node pairs can land exactly on the exclusion radii (the order-3 rule has
  // a node at the cell center); a relative guard keeps the classification
  // stable under exact translations of the whole configuration.
  double h2 = ctx.h * ctx.h * (1.0 - 1e-12), h2q = h2 / 4.0;
  for (size_t i = 0; i < qa.pts.size(); ++i)
    for (size_t j = 0; j < qb.pts.size(); ++j) {
      double df = qa.fv[i] - qb.fv[j];
      if (df == 0.0) continue;
      double dx = qa.pts[i].x - qb.pts[j].x, dy = qa.pts[i].y - qb.pts[j].y;
      double d2 = dx * dx + dy * dy;
      if (d2 < h2q) continue;
      double m = ctx.sym * qa.w[i] * qb.w[j] * pow_abs(df, ctx.p);
      double ld = std::log(d2);
      for (size_t t = 0; t < ns; ++t) {
        double v = m * std::exp(ctx.kernel_exp[t] * ld);
        acc.core_h2[t] += v;
        if (d2 >= h2) acc.core_h[t] += v;
      }
    }
  acc.evals += qa.pts.size() * qb.pts.size();
}

void near_pair(const FracContext& ctx, const Box& a, const Box& b,
               FracAccum& acc) {
  double d = box_box_distance(a, b);
  double da = a.width(), db = b.width();
  double sqrt2 = std::sqrt(2.0);
  if (d >= std::max(da, db) * sqrt2) {
    CubeQuad qa = make_quad(*ctx.f, a, 3);
    CubeQuad qb = make_quad(*ctx.f, b, 3);
    accum_pair_nodes(ctx, qa, qb, acc);
    return;
  }
  double cap = ctx.h * 1.000001;
  if (da <= cap && db <= cap) {
    core_eval(ctx, a, b, acc);
    return;
  }
  // Split the larger box.
  const Box& s = da >= db ? a : b;
  double mx = (s.lo.x + s.hi.x) / 2, my = (s.lo.y + s.hi.y) / 2;
  Box kids[4] = {{s.lo, {mx, my}},
                 {{mx, s.lo.y}, {s.hi.x, my}},
                 {{s.lo.x, my}, {mx, s.hi.y}},
                 {{mx, my}, s.hi}};
  for (const Box& kid : kids) {
    if (da >= db)
      near_pair(ctx, kid, b, acc);
    else
      near_pair(ctx, a, kid, acc);
  }
}

// Aggregation tree over the zero-side cubes for the factorized tail term.
struct TailTree {
  struct Node {
    double area = 0.0;
    double cx = 0.0, cy = 0.0;  // area-weighted centroid
    bool leaf = false;
    Box box;
  };
  std::vector<std::unordered_map<CubeKey, Node, CubeKeyHash>> levels;
  int j_max = 0;

  void build(const std::vector<const WhitneyCube*>& zs, int jmax) {
    j_max = jmax;
    levels.assign(jmax + 1, {});
    for (const WhitneyCube* z : zs) {
      Node n;
      n.box = z->key.box();
      n.area = n.box.area();
      Vec2 c = n.box.center();
      n.cx = c.x * n.area;
      n.cy = c.y * n.area;
      n.leaf = true;
      levels[z->key.level].emplace(z->key, n);
    }
    for (int j = jmax; j > 0; --j) {
      for (const auto& [key, node] : levels[j]) {
        CubeKey pk = key.parent();
        Node& pn = levels[j - 1][pk];
        if (pn.area == 0.0) {
          pn.box = pk.box();
          pn.leaf = false;
        } else if (pn.leaf) {
          continue;  // parent is itself a cover cube; children cannot exist
        }
        pn.area += node.area;
        pn.cx += node.cx;
        pn.cy += node.cy;
      }
    }
  }

  // Sum over the zero region of |x - y|^(-(2+sp)) dy for each s.
  void eval(Vec2 x, const std::vector<double>& kernel_exp,
            std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (levels.empty()) return;
    visit(x, 0, kernel_exp, out);
  }

 private:
  // Kernel integral over a box with subdivision until the box is well
  // separated from x relative to its own size.
  static void kernel_box(Vec2 x, const Box& b, const std::vector<double>& ke,
                         std::vector<double>& out) {
    double d = b.distance(x);
    double size = b.width();
    if (d < size && size > 1e-7) {
      double mx = (b.lo.x + b.hi.x) / 2, my = (b.lo.y + b.hi.y) / 2;
      Box kids[4] = {{b.lo, {mx, my}},
                     {{mx, b.lo.y}, {b.hi.x, my}},
                     {{b.lo.x, my}, {mx, b.hi.y}},
                     {{mx, my}, b.hi}};
      for (const Box& kid : kids) kernel_box(x, kid, ke, out);
      return;
    }
    tensor_gauss(b, 2, [&](Vec2 y, double w) {
      double d2 = (x - y).norm2();
      if (d2 == 0.0) return;
      double ld = std::log(d2);
      for (size_t t = 0; t < ke.size(); ++t) out[t] += w * std::exp(ke[t] * ld);
    });
  }

  void visit_node(Vec2 x, const CubeKey& key, const Node& n,
                  const std::vector<double>& kernel_exp,
                  std::vector<double>& out) const {
    double d = n.box.distance(x);
    double size = n.box.width();
    if (d >= 6.0 * size) {
      // Far: single centroid term.
      double cx = n.cx / n.area, cy = n.cy / n.area;
      double d2 = (x.x - cx) * (x.x - cx) + (x.y - cy) * (x.y - cy);
      double ld = std::log(d2);
      for (size_t t = 0; t < kernel_exp.size(); ++t)
        out[t] += n.area * std::exp(kernel_exp[t] * ld);
      return;
    }
    if (n.leaf) {
      kernel_box(x, n.box, kernel_exp, out);
      return;
    }
    for (int i = 0; i < 4; ++i) {
      CubeKey ck = key.child(i);
      auto it = levels[ck.level].find(ck);
      if (it != levels[ck.level].end())
        visit_node(x, ck, it->second, kernel_exp, out);
    }
  }
  void visit(Vec2 x, int, const std::vector<double>& kernel_exp,
             std::vector<double>& out) const {
    for (const auto& [key, node] : levels[0])
      visit_node(x, key, node, kernel_exp, out);
  }
};

}  // namespace

std::vector<double> frac_seminorm_multi(const ScalarField& f,
                                        const WhitneyCover& cover,
                                        std::span<const double> s_list, double p,
                                        FracDetail* detail) {
  if (s_list.empty()) return {};
  for (double s : s_list)
    if (!(s > 0.0 && s < 1.0))
      throw Error(ErrorKind::InvalidArgument,
                  "frac_seminorm needs 0 < s < 1, got " + format_double(s));
  if (!(p > 1.0) || std::isinf(p))
    throw Error(ErrorKind::InvalidArgument, "p must be in (1, inf)");

  size_t ns = s_list.size();
  FracContext ctx;
  ctx.f = &f;
  ctx.p = p;
  ctx.h = std::ldexp(1.0, -cover.j_max());
  ctx.sym = 1.0;
  for (double s : s_list) ctx.kernel_exp.push_back(-(2.0 + s * p) / 2.0);

  // Split cubes into support-relevant and zero-side.
  std::vector<const WhitneyCube*> rel, zero;
  bool compact = f.compact_support();
  Box supp = f.support_hint().expanded(2.0 * ctx.h);
  for (const WhitneyCube& wc : cover.cubes()) {
    if (!compact || wc.key.box().intersects(supp))
      rel.push_back(&wc);
    else
      zero.push_back(&wc);
  }

  // Quadrature caches for the relevant cubes (orders 2 and 3), plus a
  // geometric support flag so pairs with no support contact are skipped.
  std::vector<CubeQuad> q2(rel.size()), q3(rel.size());
  std::vector<char> touches(rel.size(), 1);
  Box supp_raw = f.support_hint();
  parallel_chunks((rel.size() + 63) / 64, [&](size_t c) {
    size_t lo = c * 64, hi = std::min(rel.size(), lo + 64);
    for (size_t i = lo; i < hi; ++i) {
      q2[i] = make_quad(f, rel[i]->key.box(), 2);
      q3[i] = make_quad(f, rel[i]->key.box(), 3);
      if (compact) touches[i] = rel[i]->key.box().intersects(supp_raw) ? 1 : 0;
    }
  });

  // Part A: pairs within the relevant set.
  size_t n = rel.size();
  size_t n_pairs = n * (n + 1) / 2;
  size_t block = 4096;
  size_t n_blocks = (n_pairs + block - 1) / block;
  std::vector<FracAccum> partial(n_blocks, FracAccum(ns));
  parallel_chunks(n_blocks, [&](size_t bi) {
    FracAccum acc(ns);
    size_t lo = bi * block, hi = std::min(n_pairs, lo + block);
    // Decode the triangular index of the first element of the block.
    size_t i = size_t((std::sqrt(8.0 * double(lo) + 1.0) - 1.0) / 2.0);
    while (i * (i + 1) / 2 > lo) --i;
    while ((i + 1) * (i + 2) / 2 <= lo) ++i;
    size_t j = lo - i * (i + 1) / 2;
    for (size_t idx = lo; idx < hi; ++idx) {
      const WhitneyCube* a = rel[i];
      const WhitneyCube* b = rel[j];
      bool self = (i == j);
      if (touches[i] || touches[j]) {
        Box ba = a->key.box(), bb = b->key.box();
        double d = box_box_distance(ba, bb);
        double md = std::max(a->key.diam(), b->key.diam());
        FracContext c2 = ctx;
        c2.sym = self ? 1.0 : 2.0;
        if (d >= 4.0 * md) {
          accum_pair_nodes(c2, q2[i], q2[j], acc);
        } else if (d >= md) {
          accum_pair_nodes(c2, q3[i], q3[j], acc);
        } else {
          near_pair(c2, ba, bb, acc);
        }
      }
      ++j;
      if (j > i) {
        ++i;
        j = 0;
      }
    }
    partial[bi] = std::move(acc);
  });
  FracAccum total(ns);
  for (const FracAccum& a : partial) total.merge(a);

  // Part B: relevant x zero-side, factorized through the tail integral.
  std::vector<double> tail_sum(ns, 0.0);
  if (!zero.empty()) {
    TailTree tree;
    tree.build(zero, cover.j_max());
    size_t nb = (rel.size() + 15) / 16;
    std::vector<std::vector<double>> tpart(nb, std::vector<double>(ns, 0.0));
    parallel_chunks(nb, [&](size_t c) {
      std::vector<double> tl(ns), node_out(ns);
      size_t lo = c * 16, hi = std::min(rel.size(), lo + 16);
      for (size_t i = lo; i < hi; ++i) {
        if (q3[i].all_zero) continue;
        const CubeQuad& q = q3[i];
        for (size_t m = 0; m < q.pts.size(); ++m) {
          if (q.fv[m] == 0.0) continue;
          tree.eval(q.pts[m], ctx.kernel_exp, node_out);
          double wfp = 2.0 * q.w[m] * pow_abs(q.fv[m], p);
          for (size_t t = 0; t < ns; ++t) tpart[c][t] += wfp * node_out[t];
        }
      }
    });
    for (const auto& part : tpart)
      for (size_t t = 0; t < ns; ++t) tail_sum[t] += part[t];
  }

  // Combine with Richardson extrapolation of the excluded core:
  // S(eps) = I - c eps^alpha with alpha = p(1-s).
  std::vector<double> out(ns);
  double reported_core = 0.0;
  for (size_t t = 0; t < ns; ++t) {
    double alpha = p * (1.0 - s_list[t]);
    double s_h = total.core_h[t], s_h2 = total.core_h2[t];
    double core = s_h2 + (s_h2 - s_h) / (std::exp2(alpha) - 1.0);
    if (core < s_h2) core = s_h2;  // extrapolation must not go backwards
    if (t == 0) reported_core = core - s_h2;
    out[t] = std::pow(total.main[t] + core + tail_sum[t], 1.0 / p);
  }
  if (detail) {
    detail->excluded_core = reported_core;
    detail->pair_evals = total.evals;
  }
  return out;
}

double frac_seminorm(const ScalarField& f, const WhitneyCover& cover, double s,
                     double p, FracDetail* detail) {
  double arr[1] = {s};
  return frac_seminorm_multi(f, cover, std::span<const double>(arr, 1), p,
                             detail)[0];
}

}  // namespace hardylab
