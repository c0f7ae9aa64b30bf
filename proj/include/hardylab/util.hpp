#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardylab {

// ---------------------------------------------------------------------------
// Errors. One exception type with a kind tag so the CLI can map failures to
// exit codes (configuration vs mathematical-invariant violations).
// ---------------------------------------------------------------------------

enum class ErrorKind {
  InvalidArgument,   // bad parameters, degenerate input
  ResourceLimit,     // level/size caps exceeded
  Resolution,        // domain not resolved at the requested j_max
  Setup,             // normalization / precondition on the geometry failed
  Quadrature,        // quadrature order insufficient
  Lookup,            // entity not present in a decomposition
  InvariantViolation // a verified mathematical invariant failed post-hoc
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Plane geometry primitives.
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {x * c, y * c}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double c, Vec2 v) { return v * c; }

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Box {
  Vec2 lo;
  Vec2 hi;

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {(lo.x + hi.x) / 2, (lo.y + hi.y) / 2}; }
  double diam() const { return (hi - lo).norm(); }

  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  bool contains(const Box& b) const {
    return b.lo.x >= lo.x && b.lo.y >= lo.y && b.hi.x <= hi.x && b.hi.y <= hi.y;
  }
  bool intersects(const Box& b) const {
    return b.lo.x <= hi.x && lo.x <= b.hi.x && b.lo.y <= hi.y && lo.y <= b.hi.y;
  }
  // Euclidean distance from p to the box (0 if inside).
  double distance(Vec2 p) const {
    double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return std::hypot(dx, dy);
  }
  // Largest distance from p to a point of the box.
  double max_distance(Vec2 p) const {
    double dx = std::max(std::abs(p.x - lo.x), std::abs(p.x - hi.x));
    double dy = std::max(std::abs(p.y - lo.y), std::abs(p.y - hi.y));
    return std::hypot(dx, dy);
  }
  Box expanded(double m) const { return {{lo.x - m, lo.y - m}, {hi.x + m, hi.y + m}}; }

  static Box hull(const Box& a, const Box& b) {
    return {{std::min(a.lo.x, b.lo.x), std::min(a.lo.y, b.lo.y)},
            {std::max(a.hi.x, b.hi.x), std::max(a.hi.y, b.hi.y)}};
  }
};

// Overlap area of two boxes (0 if disjoint).
inline double overlap_area(const Box& a, const Box& b) {
  double w = std::min(a.hi.x, b.hi.x) - std::max(a.lo.x, b.lo.x);
  double h = std::min(a.hi.y, b.hi.y) - std::max(a.lo.y, b.lo.y);
  if (w <= 0 || h <= 0) return 0.0;
  return w * h;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double t = ab.norm2();
  if (t == 0.0) return dist(p, a);
  double u = std::clamp((p - a).dot(ab) / t, 0.0, 1.0);
  return dist(p, a + u * ab);
}

// Distance from an axis-aligned box to a segment (0 if they intersect).
double box_segment_distance(const Box& box, Vec2 a, Vec2 b);

// Proper or touching intersection test for two closed segments.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// ---------------------------------------------------------------------------
// Compensated summation. All big reductions go through this so results do not
// depend on the parallel schedule.
// ---------------------------------------------------------------------------

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// ---------------------------------------------------------------------------
// Deterministic RNG. std::mt19937_64 with explicit mappings; the standard
// distributions are implementation-defined, so they are not used anywhere.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next_u64() {
    // splitmix64 step; stable across platforms.
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  Vec2 point_in(const Box& b) {
    return {uniform(b.lo.x, b.hi.x), uniform(b.lo.y, b.hi.y)};
  }
  size_t index(size_t n) { return size_t(next_u64() % n); }

 private:
  uint64_t state_;
};

// ---------------------------------------------------------------------------
// FNV-1a for config hashes and report provenance.
// ---------------------------------------------------------------------------

inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

// Fixed-format float printing for reproducible CSV output.
std::string format_double(double v);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hardylab
