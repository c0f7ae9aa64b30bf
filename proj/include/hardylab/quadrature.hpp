#pragma once

#include <vector>

#include "hardylab/util.hpp"

namespace hardylab {

// Gauss-Legendre rule on [0,1]; nodes computed once by Newton iteration on
// the Legendre polynomial, so no tables and no platform dependence.
struct GaussRule {
  std::vector<double> nodes;    // in (0,1)
  std::vector<double> weights;  // sum to 1
};

// order = number of points per axis, 1..16.
const GaussRule& gauss_rule(int order);

// Tensor rule over a box: calls fn(point, weight) with weights summing to
// the box area.
template <typename F>
void tensor_gauss(const Box& b, int order, F&& fn) {
  const GaussRule& r = gauss_rule(order);
  double w = b.width(), h = b.height(), area = w * h;
  for (size_t i = 0; i < r.nodes.size(); ++i)
    for (size_t j = 0; j < r.nodes.size(); ++j)
      fn(Vec2{b.lo.x + w * r.nodes[i], b.lo.y + h * r.nodes[j]},
         area * r.weights[i] * r.weights[j]);
}

}  // namespace hardylab
