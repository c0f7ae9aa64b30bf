#include "hardylab/field.hpp"

#include <cmath>

namespace hardylab {

ScalarField bump_field(Vec2 center, double radius, double amplitude) {
  if (radius <= 0)
    throw Error(ErrorKind::InvalidArgument, "bump radius must be positive");
  auto eval = [center, radius, amplitude](Vec2 p) {
    double t2 = (p - center).norm2() / (radius * radius);
    if (t2 >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - t2));
  };
  Box supp{{center.x - radius, center.y - radius},
           {center.x + radius, center.y + radius}};
  return ScalarField(eval, supp, true, Smoothness::Smooth,
                     "bump(c=" + format_double(center.x) + "," +
                         format_double(center.y) + ",r=" + format_double(radius) +
                         ")");
}

ScalarField poly_field(std::vector<Monomial> terms) {
  auto eval = [terms](Vec2 p) {
    double v = 0.0;
    for (const Monomial& m : terms)
      v += m.coeff * std::pow(p.x, m.ax) * std::pow(p.y, m.ay);
    return v;
  };
  return ScalarField(eval, {{-1e30, -1e30}, {1e30, 1e30}}, false,
                     Smoothness::Smooth, "poly");
}

ScalarField coordinate_field(int axis) {
  if (axis != 0 && axis != 1)
    throw Error(ErrorKind::InvalidArgument, "axis must be 0 or 1");
  auto eval = [axis](Vec2 p) { return axis == 0 ? p.x : p.y; };
  return ScalarField(eval, {{-1e30, -1e30}, {1e30, 1e30}}, false,
                     Smoothness::Smooth, axis == 0 ? "coord-x" : "coord-y");
}

ScalarField constant_field(double c) {
  return ScalarField([c](Vec2) { return c; }, {{-1e30, -1e30}, {1e30, 1e30}},
                     false, Smoothness::Smooth, "const(" + format_double(c) + ")");
}

ScalarField scaled_field(const ScalarField& f, double r) {
  if (r <= 0) throw Error(ErrorKind::InvalidArgument, "scale must be positive");
  auto eval = [f, r](Vec2 p) { return f(Vec2{p.x / r, p.y / r}); };
  Box s = f.support_hint();
  Box supp{{s.lo.x * r, s.lo.y * r}, {s.hi.x * r, s.hi.y * r}};
  return ScalarField(eval, supp, f.compact_support(), f.smoothness(),
                     f.id() + "@r=" + format_double(r));
}

ScalarField translated_field(const ScalarField& f, Vec2 v) {
  auto eval = [f, v](Vec2 p) { return f(p - v); };
  Box s = f.support_hint();
  return ScalarField(eval, {s.lo + v, s.hi + v}, f.compact_support(),
                     f.smoothness(), f.id() + "+v");
}

ScalarField masked_field(const ScalarField& f, const Domain& domain) {
  auto eval = [f, domain](Vec2 p) { return domain.inside(p) ? f(p) : 0.0; };
  return ScalarField(eval, f.support_hint(), f.compact_support(),
                     Smoothness::Discontinuous, "chi*" + f.id());
}

ScalarField shifted_field(const ScalarField& f, double constant) {
  auto eval = [f, constant](Vec2 p) { return f(p) + constant; };
  return ScalarField(eval, {{-1e30, -1e30}, {1e30, 1e30}}, false,
                     f.smoothness(), f.id() + "+const");
}

}  // namespace hardylab
