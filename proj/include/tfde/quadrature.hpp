#pragma once

#include <vector>

namespace tfde {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

// Gauss-Legendre on [-1, 1]
const Rule& gauss_legendre(int n);

// Gauss-Jacobi on [-1, 1] with weight (1-x)^a (1+x)^b, a, b > -1
const Rule& gauss_jacobi(int n, double a, double b);

// Gauss-Legendre mapped to [lo, hi]
Rule legendre_on(int n, double lo, double hi);

// weight (x - lo)^e on [lo, hi]
Rule jacobi_left_on(int n, double e, double lo, double hi);

// weight (hi - x)^e on [lo, hi]
Rule jacobi_right_on(int n, double e, double lo, double hi);

}  // namespace tfde
