#pragma once

#include <functional>
#include <memory>
#include <string>

#include "hardylab/geometry.hpp"
#include "hardylab/util.hpp"

namespace hardylab {

enum class Smoothness { Smooth, Discontinuous };

// Scalar function on the plane with a conservative support box. Fields with
// unbounded support carry `compact_support = false` and a huge hint box.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::function<double(Vec2)> eval, Box support_hint,
              bool compact_support, Smoothness smoothness, std::string id)
      : eval_(std::move(eval)),
        support_(support_hint),
        compact_(compact_support),
        smooth_(smoothness),
        id_(std::move(id)) {}

  double operator()(Vec2 p) const { return eval_(p); }
  const Box& support_hint() const { return support_; }
  bool compact_support() const { return compact_; }
  Smoothness smoothness() const { return smooth_; }
  const std::string& id() const { return id_; }

 private:
  std::function<double(Vec2)> eval_;
  Box support_ = {{-1e30, -1e30}, {1e30, 1e30}};
  bool compact_ = false;
  Smoothness smooth_ = Smoothness::Smooth;
  std::string id_;
};

// C-infinity radial bump: amplitude at `center`, support exactly
// the closed disk of the given radius.
ScalarField bump_field(Vec2 center, double radius, double amplitude = 1.0);

// Sum of monomials coeff * x^ax * y^ay.
struct Monomial {
  int ax = 0, ay = 0;
  double coeff = 0.0;
};
ScalarField poly_field(std::vector<Monomial> terms);

ScalarField coordinate_field(int axis);
ScalarField constant_field(double c);

// x -> f(x / r); for r < 1 this concentrates f toward the origin.
ScalarField scaled_field(const ScalarField& f, double r);
ScalarField translated_field(const ScalarField& f, Vec2 v);
// Pointwise chi_G * f.
ScalarField masked_field(const ScalarField& f, const Domain& domain);
ScalarField shifted_field(const ScalarField& f, double constant);  // f + c

}  // namespace hardylab
