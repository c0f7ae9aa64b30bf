#include "hardylab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hardylab {

// --------------------------------------------------------------------------
// PointSet
// --------------------------------------------------------------------------

PointSet::PointSet(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  if (pts_.empty())
    throw Error(ErrorKind::InvalidArgument, "PointSet: no points");
  bbox_ = {pts_[0], pts_[0]};
  for (Vec2 p : pts_) bbox_ = Box::hull(bbox_, {p, p});
}

double PointSet::distance(Vec2 p) const {
  double best = dist(p, pts_[0]);
  for (size_t i = 1; i < pts_.size(); ++i) best = std::min(best, dist(p, pts_[i]));
  return best;
}

Vec2 PointSet::nearest_point(Vec2 p) const {
  Vec2 best = pts_[0];
  for (const Vec2& q : pts_)
    if (dist(p, q) < dist(p, best)) best = q;
  return best;
}

std::vector<Vec2> PointSet::sample_points(int n, uint64_t seed) const {
  Rng rng(seed);
  std::vector<Vec2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(pts_[rng.index(pts_.size())]);
  return out;
}

// --------------------------------------------------------------------------
// SegmentSet
// --------------------------------------------------------------------------

SegmentSet::SegmentSet(std::vector<Segment> segs, std::string name)
    : segs_(std::move(segs)), name_(std::move(name)) {
  if (segs_.empty())
    throw Error(ErrorKind::InvalidArgument, "SegmentSet: no segments");
  order_.resize(segs_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * segs_.size());
  build(order_, 0, int(order_.size()));
  bbox_ = nodes_[0].box;
  min_len_ = segs_[0].length();
  for (const Segment& s : segs_) min_len_ = std::min(min_len_, s.length());
}

int SegmentSet::build(std::vector<int>& ids, int begin, int end) {
  Node node;
  node.box = segs_[ids[begin]].bbox();
  for (int i = begin + 1; i < end; ++i)
    node.box = Box::hull(node.box, segs_[ids[i]].bbox());
  int idx = int(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= 8) {
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    return idx;
  }
  int axis = node.box.width() >= node.box.height() ? 0 : 1;
  int mid = (begin + end) / 2;
  std::nth_element(ids.begin() + begin, ids.begin() + mid, ids.begin() + end,
                   [&](int a, int b) {
                     Vec2 ca = segs_[a].bbox().center(), cb = segs_[b].bbox().center();
                     return axis == 0 ? ca.x < cb.x : ca.y < cb.y;
                   });
  int l = build(ids, begin, mid);
  int r = build(ids, mid, end);
  nodes_[idx].left = l;
  nodes_[idx].right = r;
  return idx;
}

double SegmentSet::distance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  // Explicit stack, nearest child first.
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    int ni = stack[--top];
    const Node& node = nodes_[ni];
    if (node.box.distance(p) >= best) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const Segment& s = segs_[order_[i]];
        best = std::min(best, segment_distance(p, s.a, s.b));
      }
      continue;
    }
    double dl = nodes_[node.left].box.distance(p);
    double dr = nodes_[node.right].box.distance(p);
    if (dl < dr) {
      if (dr < best) stack[top++] = node.right;
      if (dl < best) stack[top++] = node.left;
    } else {
      if (dl < best) stack[top++] = node.left;
      if (dr < best) stack[top++] = node.right;
    }
  }
  return best;
}

Vec2 SegmentSet::nearest_point(Vec2 p) const {
  // Same traversal as distance(), tracking the argmin.
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_pt = segs_[0].a;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.distance(p) >= best) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const Segment& s = segs_[order_[i]];
        Vec2 ab = s.b - s.a;
        double t = ab.norm2();
        double u = t == 0.0 ? 0.0 : std::clamp((p - s.a).dot(ab) / t, 0.0, 1.0);
        Vec2 q = s.a + u * ab;
        double d = dist(p, q);
        if (d < best) {
          best = d;
          best_pt = q;
        }
      }
      continue;
    }
    double dl = nodes_[node.left].box.distance(p);
    double dr = nodes_[node.right].box.distance(p);
    if (dl < dr) {
      if (dr < best) stack[top++] = node.right;
      if (dl < best) stack[top++] = node.left;
    } else {
      if (dl < best) stack[top++] = node.left;
      if (dr < best) stack[top++] = node.right;
    }
  }
  return best_pt;
}

std::vector<Vec2> SegmentSet::sample_points(int n, uint64_t seed) const {
  Rng rng(seed);
  std::vector<Vec2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Segment& s = segs_[rng.index(segs_.size())];
    double t = rng.uniform();
    out.push_back(s.a + t * (s.b - s.a));
  }
  return out;
}

// --------------------------------------------------------------------------
// DustBoundarySet
// --------------------------------------------------------------------------

DustBoundarySet::DustBoundarySet(double ratio, int level, double width, Vec2 origin)
    : ratio_(ratio), level_(level), width_(width), origin_(origin) {
  if (!(ratio > 0.0 && ratio < 0.5))
    throw Error(ErrorKind::InvalidArgument,
                "dust ratio must be in (0, 1/2), got " + std::to_string(ratio));
  if (level < 0 || level > 7)
    throw Error(ErrorKind::ResourceLimit,
                "dust level must be in [0, 7], got " + std::to_string(level));
  if (width <= 0)
    throw Error(ErrorKind::InvalidArgument, "dust width must be positive");
}

Box DustBoundarySet::bounding_box() const {
  return {origin_, origin_ + Vec2{width_, width_}};
}

double DustBoundarySet::primitive_scale() const {
  return width_ * std::pow(ratio_, level_);
}

// Distance from p to the leaf square [lo, lo+size]^2 boundary: positive
// outside, and distance to the nearest side when p is inside the square.
static double square_boundary_distance(Vec2 p, Vec2 lo, double size) {
  Box b{lo, lo + Vec2{size, size}};
  double out = b.distance(p);
  if (out > 0.0) return out;
  double inx = std::min(p.x - b.lo.x, b.hi.x - p.x);
  double iny = std::min(p.y - b.lo.y, b.hi.y - p.y);
  return std::min(inx, iny);
}

double DustBoundarySet::descend(Vec2 p, int depth, Vec2 lo, double size,
                                double best) const {
  if (depth == level_) return std::min(best, square_boundary_distance(p, lo, size));
  double child = size * ratio_;
  double off = size - child;  // = (1 - ratio) * size
  Vec2 los[4] = {lo,
                 {lo.x + off, lo.y},
                 {lo.x, lo.y + off},
                 {lo.x + off, lo.y + off}};
  // Visit children nearest-first for tight pruning.
  double d[4];
  int idx[4] = {0, 1, 2, 3};
  for (int i = 0; i < 4; ++i)
    d[i] = Box{los[i], los[i] + Vec2{child, child}}.distance(p);
  std::sort(idx, idx + 4, [&](int a, int b) { return d[a] < d[b]; });
  for (int i = 0; i < 4; ++i) {
    int c = idx[i];
    if (d[c] >= best) break;
    best = descend(p, depth + 1, los[c], child, best);
  }
  return best;
}

double DustBoundarySet::distance(Vec2 p) const {
  return descend(p, 0, origin_, width_,
                 std::numeric_limits<double>::infinity());
}

Vec2 DustBoundarySet::nearest_point(Vec2 p) const {
  // Locate the nearest leaf square by distance, then project onto its
  // boundary. A leaf realizing the distance is found by re-descending.
  double d = distance(p);
  Vec2 best_pt = p;
  double best_err = std::numeric_limits<double>::infinity();
  struct Item { Vec2 lo; double size; int depth; };
  std::vector<Item> stack{{origin_, width_, 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    Box b{it.lo, it.lo + Vec2{it.size, it.size}};
    if (b.distance(p) > d + 1e-12) continue;
    if (it.depth == level_) {
      double sd = square_boundary_distance(p, it.lo, it.size);
      if (std::abs(sd - d) < best_err) {
        best_err = std::abs(sd - d);
        if (b.distance(p) > 0) {
          best_pt = {std::clamp(p.x, b.lo.x, b.hi.x),
                     std::clamp(p.y, b.lo.y, b.hi.y)};
        } else {
          // Inside: project to the nearest side.
          double dl = p.x - b.lo.x, dr = b.hi.x - p.x;
          double db = p.y - b.lo.y, dt = b.hi.y - p.y;
          double m = std::min({dl, dr, db, dt});
          if (m == dl) best_pt = {b.lo.x, p.y};
          else if (m == dr) best_pt = {b.hi.x, p.y};
          else if (m == db) best_pt = {p.x, b.lo.y};
          else best_pt = {p.x, b.hi.y};
        }
      }
      continue;
    }
    double child = it.size * ratio_;
    double off = it.size - child;
    for (Vec2 cl : {it.lo,
                    Vec2{it.lo.x + off, it.lo.y},
                    Vec2{it.lo.x, it.lo.y + off},
                    Vec2{it.lo.x + off, it.lo.y + off}})
      stack.push_back({cl, child, it.depth + 1});
  }
  return best_pt;
}

bool DustBoundarySet::in_dust(Vec2 p) const {
  Vec2 lo = origin_;
  double size = width_;
  for (int depth = 0; depth < level_; ++depth) {
    double child = size * ratio_;
    double off = size - child;
    bool found = false;
    for (Vec2 cl : {lo,
                    Vec2{lo.x + off, lo.y},
                    Vec2{lo.x, lo.y + off},
                    Vec2{lo.x + off, lo.y + off}}) {
      if (Box{cl, cl + Vec2{child, child}}.contains(p)) {
        lo = cl;
        size = child;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return Box{lo, lo + Vec2{size, size}}.contains(p);
}

std::vector<Box> DustBoundarySet::squares() const {
  std::vector<Box> out;
  out.reserve(size_t(std::pow(4.0, level_)));
  struct Item {
    Vec2 lo;
    double size;
    int depth;
  };
  std::vector<Item> stack{{origin_, width_, 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.depth == level_) {
      out.push_back({it.lo, it.lo + Vec2{it.size, it.size}});
      continue;
    }
    double child = it.size * ratio_;
    double off = it.size - child;
    for (Vec2 cl : {it.lo,
                    Vec2{it.lo.x + off, it.lo.y},
                    Vec2{it.lo.x, it.lo.y + off},
                    Vec2{it.lo.x + off, it.lo.y + off}})
      stack.push_back({cl, child, it.depth + 1});
  }
  std::sort(out.begin(), out.end(), [](const Box& a, const Box& b) {
    return a.lo.x != b.lo.x ? a.lo.x < b.lo.x : a.lo.y < b.lo.y;
  });
  return out;
}

std::vector<Vec2> DustBoundarySet::sample_points(int n, uint64_t seed) const {
  Rng rng(seed);
  std::vector<Vec2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    // Random leaf square, random point on its perimeter.
    Vec2 lo = origin_;
    double size = width_;
    for (int depth = 0; depth < level_; ++depth) {
      double child = size * ratio_;
      double off = size - child;
      int c = int(rng.index(4));
      lo = {lo.x + (c & 1 ? off : 0.0), lo.y + (c & 2 ? off : 0.0)};
      size = child;
    }
    double t = rng.uniform(0.0, 4.0);
    int side = int(t);
    double u = (t - side) * size;
    switch (side) {
      case 0: out.push_back({lo.x + u, lo.y}); break;
      case 1: out.push_back({lo.x + size, lo.y + u}); break;
      case 2: out.push_back({lo.x + size - u, lo.y + size}); break;
      default: out.push_back({lo.x, lo.y + size - u}); break;
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Domain implementations
// --------------------------------------------------------------------------

class Domain::Impl {
 public:
  virtual ~Impl() = default;
  virtual bool inside(Vec2 p) const = 0;
  virtual const SetOracle& boundary() const = 0;
  virtual std::shared_ptr<const SetOracle> boundary_ptr() const = 0;
  virtual Box cover_window() const = 0;
  virtual bool is_bounded() const = 0;
  virtual bool complement_null() const { return false; }
  virtual std::optional<double> known_aikawa_dim() const { return std::nullopt; }

  std::string name;
  double boundary_diameter = 0.0;
};

double Domain::boundary_distance(Vec2 p) const { return impl_->boundary().distance(p); }
bool Domain::inside(Vec2 p) const { return impl_->inside(p); }
std::pair<double, bool> Domain::distance_inside(Vec2 p) const {
  return {impl_->boundary().distance(p), impl_->inside(p)};
}
const SetOracle& Domain::boundary() const { return impl_->boundary(); }
std::shared_ptr<const SetOracle> Domain::boundary_ptr() const {
  return impl_->boundary_ptr();
}
Box Domain::cover_window() const { return impl_->cover_window(); }
double Domain::boundary_diameter() const { return impl_->boundary_diameter; }
std::optional<double> Domain::known_aikawa_dim() const {
  return impl_->known_aikawa_dim();
}
bool Domain::complement_null() const { return impl_->complement_null(); }
bool Domain::is_bounded() const { return impl_->is_bounded(); }
const std::string& Domain::name() const { return impl_->name; }

namespace {

// Hull diameter via monotone chain + rotating calipers.
double polygon_diameter(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) return 0.0;
  auto cross3 = [](Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Vec2> hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  size_t lower = k + 1;
  for (size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double best = 0.0;
  size_t m = hull.size(), j = 1;
  if (m == 2) return dist(hull[0], hull[1]);
  for (size_t i = 0; i < m; ++i) {
    for (;;) {
      double cur = (hull[i] - hull[j]).norm2();
      double nxt = (hull[i] - hull[(j + 1) % m]).norm2();
      if (nxt > cur) j = (j + 1) % m;
      else break;
    }
    best = std::max(best, dist(hull[i], hull[j]));
  }
  return best;
}

class PolygonDomain final : public Domain::Impl {
 public:
  PolygonDomain(std::vector<Vec2> vertices, const std::string& dom_name,
                std::optional<double> known_dim = std::nullopt)
      : known_dim_(known_dim) {
    if (vertices.size() < 3)
      throw Error(ErrorKind::InvalidArgument, "polygon needs >= 3 vertices");
    double area2 = 0.0;
    size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 a = vertices[i], b = vertices[(i + 1) % n];
      area2 += a.x * b.y - b.x * a.y;
    }
    double scale = polygon_diameter(vertices);
    if (std::abs(area2) <= 1e-14 * std::max(1.0, scale * scale))
      throw Error(ErrorKind::InvalidArgument, "degenerate polygon (zero area)");

    std::vector<Segment> segs;
    segs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      Segment s{vertices[i], vertices[(i + 1) % n]};
      if (s.length() == 0.0)
        throw Error(ErrorKind::InvalidArgument, "polygon has a zero-length edge");
      segs.push_back(s);
    }
    check_simple(segs);

    verts_ = std::move(vertices);
    boundary_ = std::make_shared<SegmentSet>(std::move(segs), dom_name + "-boundary");
    name = dom_name;
    boundary_diameter = scale;
    build_bands();
  }

  bool inside(Vec2 p) const override {
    // Even-odd rule; candidate edges from the y-band index.
    const Box& bb = boundary_->bounding_box();
    if (!bb.contains(p)) return false;
    int band = band_of(p.y);
    bool in = false;
    for (int ei : bands_[band]) {
      Vec2 a = boundary_->segments()[ei].a, b = boundary_->segments()[ei].b;
      if ((a.y > p.y) != (b.y > p.y)) {
        double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (xi > p.x) in = !in;
      }
    }
    return in;
  }
  const SetOracle& boundary() const override { return *boundary_; }
  std::shared_ptr<const SetOracle> boundary_ptr() const override { return boundary_; }
  Box cover_window() const override {
    Box bb = boundary_->bounding_box();
    Box unit{{0, 0}, {1, 1}};
    if (!unit.expanded(1e-12).contains(bb))
      throw Error(ErrorKind::Setup,
                  "polygon domain is not normalized into the unit square");
    return unit;
  }
  bool is_bounded() const override { return true; }
  std::optional<double> known_aikawa_dim() const override { return known_dim_; }

 private:
  std::optional<double> known_dim_;

  static void check_simple(const std::vector<Segment>& segs) {
    // Grid-bucketed pair test; adjacent edges share exactly one endpoint.
    size_t n = segs.size();
    Box bb = segs[0].bbox();
    double avg_len = 0.0;
    for (const Segment& s : segs) {
      bb = Box::hull(bb, s.bbox());
      avg_len += s.length();
    }
    avg_len /= double(n);
    int cells = std::clamp(int(std::sqrt(double(n))) * 2, 1, 1024);
    double cw = std::max(bb.width(), 1e-30) / cells;
    double ch = std::max(bb.height(), 1e-30) / cells;
    auto cell_range = [&](const Box& b, int& x0, int& x1, int& y0, int& y1) {
      x0 = std::clamp(int((b.lo.x - bb.lo.x) / cw), 0, cells - 1);
      x1 = std::clamp(int((b.hi.x - bb.lo.x) / cw), 0, cells - 1);
      y0 = std::clamp(int((b.lo.y - bb.lo.y) / ch), 0, cells - 1);
      y1 = std::clamp(int((b.hi.y - bb.lo.y) / ch), 0, cells - 1);
    };
    std::vector<std::vector<int>> grid(size_t(cells) * cells);
    for (size_t i = 0; i < n; ++i) {
      int x0, x1, y0, y1;
      cell_range(segs[i].bbox(), x0, x1, y0, y1);
      for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) {
          for (int j : grid[size_t(y) * cells + x]) {
            size_t d = (i + n - j) % n;
            if (d == 1 || d == n - 1) continue;  // adjacent, share a vertex
            if (segments_intersect(segs[i].a, segs[i].b, segs[j].a, segs[j].b))
              throw Error(ErrorKind::InvalidArgument, "polygon is self-intersecting");
          }
          grid[size_t(y) * cells + x].push_back(int(i));
        }
    }
  }

  void build_bands() {
    const Box& bb = boundary_->bounding_box();
    int n_bands = std::clamp(int(boundary_->segments().size()), 16, 2048);
    bands_.assign(n_bands + 1, {});
    band_lo_ = bb.lo.y;
    band_h_ = (bb.hi.y - bb.lo.y) / n_bands;
    if (band_h_ <= 0) band_h_ = 1.0;
    for (size_t i = 0; i < boundary_->segments().size(); ++i) {
      const Segment& s = boundary_->segments()[i];
      int b0 = band_of(std::min(s.a.y, s.b.y));
      int b1 = band_of(std::max(s.a.y, s.b.y));
      for (int b = b0; b <= b1; ++b) bands_[b].push_back(int(i));
    }
  }
  int band_of(double y) const {
    int n = int(bands_.size()) - 1;
    return std::clamp(int((y - band_lo_) / band_h_), 0, n);
  }

  std::vector<Vec2> verts_;
  std::shared_ptr<SegmentSet> boundary_;
  std::vector<std::vector<int>> bands_;
  double band_lo_ = 0.0, band_h_ = 1.0;
};

class DustComplementDomain final : public Domain::Impl {
 public:
  DustComplementDomain(double ratio, int level, double width, Vec2 center) {
    Vec2 origin = center - Vec2{width / 2, width / 2};
    dust_ = std::make_shared<DustBoundarySet>(ratio, level, width, origin);
    Box bb = dust_->bounding_box();
    if (!Box{{0, 0}, {1, 1}}.contains(bb))
      throw Error(ErrorKind::Setup, "dust must sit inside the unit square");
    name = "dust-complement(ratio=" + format_double(ratio) +
           ",level=" + std::to_string(level) + ",width=" + format_double(width) + ")";
    boundary_diameter = bb.diam();
    dim_ = 2.0 * std::log(2.0) / std::log(1.0 / ratio);
  }

  bool inside(Vec2 p) const override { return !dust_->in_dust(p); }
  const SetOracle& boundary() const override { return *dust_; }
  std::shared_ptr<const SetOracle> boundary_ptr() const override { return dust_; }
  Box cover_window() const override { return {{0, 0}, {1, 1}}; }
  bool is_bounded() const override { return false; }
  bool complement_null() const override { return true; }
  std::optional<double> known_aikawa_dim() const override { return dim_; }

 private:
  std::shared_ptr<DustBoundarySet> dust_;
  double dim_ = 0.0;
};

class PointComplementDomain final : public Domain::Impl {
 public:
  explicit PointComplementDomain(Vec2 p) {
    point_ = std::make_shared<PointSet>(std::vector<Vec2>{p});
    if (!Box{{0, 0}, {1, 1}}.contains(p))
      throw Error(ErrorKind::Setup, "point must sit inside the unit square");
    name = "point-complement";
    boundary_diameter = 0.0;
    p_ = p;
  }
  bool inside(Vec2 q) const override { return !(q == p_); }
  const SetOracle& boundary() const override { return *point_; }
  std::shared_ptr<const SetOracle> boundary_ptr() const override { return point_; }
  Box cover_window() const override { return {{0, 0}, {1, 1}}; }
  bool is_bounded() const override { return false; }
  bool complement_null() const override { return true; }
  std::optional<double> known_aikawa_dim() const override { return 0.0; }

 private:
  std::shared_ptr<PointSet> point_;
  Vec2 p_;
};

}  // namespace

Domain make_polygon_domain(std::vector<Vec2> vertices, const std::string& name) {
  return Domain(std::make_shared<PolygonDomain>(std::move(vertices), name));
}

Domain make_koch_snowflake(int level, double side, Vec2 center) {
  if (level < 0) throw Error(ErrorKind::InvalidArgument, "negative level");
  if (level > 8)
    throw Error(ErrorKind::ResourceLimit,
                "koch level capped at 8 (3*4^level edges), got " +
                    std::to_string(level));
  double r = side / std::sqrt(3.0);
  std::vector<Vec2> verts;
  for (double deg : {90.0, 210.0, 330.0}) {
    double a = deg * M_PI / 180.0;
    verts.push_back(center + r * Vec2{std::cos(a), std::sin(a)});
  }
  for (int l = 0; l < level; ++l) {
    std::vector<Vec2> next;
    next.reserve(verts.size() * 4);
    size_t n = verts.size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 a = verts[i], b = verts[(i + 1) % n];
      Vec2 d = b - a;
      Vec2 p1 = a + d * (1.0 / 3.0);
      Vec2 p2 = a + d * (2.0 / 3.0);
      // Outward normal for a counterclockwise polygon is (dy, -dx).
      Vec2 out{d.y, -d.x};
      Vec2 apex = a + d * 0.5 + out * (std::sqrt(3.0) / 6.0);
      next.push_back(a);
      next.push_back(p1);
      next.push_back(apex);
      next.push_back(p2);
    }
    verts = std::move(next);
  }
  // The approximants stay inside the circumdisk of the base triangle.
  for (Vec2 v : verts)
    if (dist(v, center) > r + 1e-9)
      throw Error(ErrorKind::InvariantViolation, "koch vertex outside circumdisk");
  return Domain(std::make_shared<PolygonDomain>(
      std::move(verts), "koch(level=" + std::to_string(level) + ")",
      std::log(4.0) / std::log(3.0)));
}

Domain make_point_complement(Vec2 p) {
  return Domain(std::make_shared<PointComplementDomain>(p));
}

Domain make_cantor_dust_complement(double ratio, int level, double width,
                                   Vec2 center) {
  return Domain(
      std::make_shared<DustComplementDomain>(ratio, level, width, center));
}

}  // namespace hardylab
