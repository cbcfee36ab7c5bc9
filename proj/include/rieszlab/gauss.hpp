#pragma once

#include <vector>

namespace riesz {

// Gauss-Legendre nodes and weights on [-1, 1]. Rules are computed once per
// node count and cached; lookup is thread safe.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int n);

}  // namespace riesz
