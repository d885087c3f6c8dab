#pragma once

#include <vector>

namespace kerrwig::detail {

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point rule on [-1, 1], computed once per n and cached.
const GaussLegendre& gauss_legendre(int n);

}  // namespace kerrwig::detail
