#include "hardylab/util.hpp"

#include <cstdio>
#include <map>
#include <mutex>

#include "hardylab/parallel.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab {

double box_segment_distance(const Box& box, Vec2 a, Vec2 b) {
  // Inside or crossing: distance 0.
  if (box.contains(a) || box.contains(b)) return 0.0;
  Vec2 c00 = box.lo, c11 = box.hi;
  Vec2 c10 = {box.hi.x, box.lo.y}, c01 = {box.lo.x, box.hi.y};
  if (segments_intersect(a, b, c00, c10) || segments_intersect(a, b, c10, c11) ||
      segments_intersect(a, b, c11, c01) || segments_intersect(a, b, c01, c00))
    return 0.0;
  // Disjoint: min over corner-to-segment and endpoint-to-box distances.
  double d = std::min(box.distance(a), box.distance(b));
  for (Vec2 c : {c00, c10, c11, c01}) d = std::min(d, segment_distance(c, a, b));
  return d;
}

namespace {
double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}
bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}
}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  double d1 = cross(c, d, a), d2 = cross(c, d, b);
  double d3 = cross(a, b, c), d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// --------------------------------------------------------------------------
// Gauss-Legendre nodes by Newton iteration.
// --------------------------------------------------------------------------

namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess on [-1,1].
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre P_n(x) and derivative by recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  if (order < 1 || order > 16)
    throw Error(ErrorKind::InvalidArgument,
                "gauss order out of range: " + std::to_string(order));
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

// --------------------------------------------------------------------------
// Deterministic parallel reduction.
// --------------------------------------------------------------------------

namespace {
int g_jobs = 0;
}

void set_parallelism(int jobs) { g_jobs = jobs; }

int parallelism() {
  if (g_jobs > 0) return g_jobs;
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? int(hc) : 1;
}

void parallel_chunks(size_t n_chunks, const std::function<void(size_t)>& fn) {
  int workers = std::min<size_t>(parallelism(), n_chunks);
  if (workers <= 1) {
    for (size_t i = 0; i < n_chunks; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n_chunks) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (err) std::rethrow_exception(err);
}

double block_reduce(size_t n, size_t block_size,
                    const std::function<void(size_t, Kahan&)>& body) {
  if (n == 0) return 0.0;
  if (block_size == 0) block_size = 1024;
  size_t n_blocks = (n + block_size - 1) / block_size;
  std::vector<double> partial(n_blocks, 0.0);
  parallel_chunks(n_blocks, [&](size_t b) {
    Kahan acc;
    size_t lo = b * block_size, hi = std::min(n, lo + block_size);
    for (size_t i = lo; i < hi; ++i) body(i, acc);
    partial[b] = acc.value();
  });
  Kahan total;
  for (double v : partial) total.add(v);
  return total.value();
}

}  // namespace hardylab
