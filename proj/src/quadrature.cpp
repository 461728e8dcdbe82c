#include "tfde/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "tfde/error.hpp"

namespace tfde {
namespace {

struct JacobiValue {
  double p;
  double dp;
};

JacobiValue jacobi_eval(int n, double a, double b, double x) {
  double p0 = 1.0;
  if (n == 0) return {1.0, 0.0};
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + a + b;
    const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    const double p2 = (c2 * p1 - c3 * p0) / c1;
    p0 = p1;
    p1 = p2;
  }
  const double s = 2.0 * n + a + b;
  const double dp = (n * (a - b - s * x) * p1 + 2.0 * (n + a) * (n + b) * p0) /
                    (s * (1.0 - x * x));
  return {p1, dp};
}

Rule build_jacobi(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::InvalidParameter, "quadrature size must be positive");
  if (a <= -1.0 || b <= -1.0)
    throw Error(ErrorKind::InvalidParameter, "Jacobi exponents must exceed -1");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 1));
  diag(0) = (b - a) / (a + b + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag(k) = (b * b - a * a) / (s * (s + 2.0));
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      b2 = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off(k - 1) = std::sqrt(b2);
  }
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  if (n == 1) {
    r.x[0] = diag(0);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off.head(n - 1), Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) r.x[i] = es.eigenvalues()(i);
  }
  const double logc = std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                      std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0) +
                      (a + b + 1.0) * std::log(2.0);
  for (int i = 0; i < n; ++i) {
    double x = r.x[i];
    for (int it = 0; it < 3; ++it) {
      const JacobiValue v = jacobi_eval(n, a, b, x);
      const double dx = v.p / v.dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = x;
    const JacobiValue v = jacobi_eval(n, a, b, x);
    r.w[i] = std::exp(logc) / ((1.0 - x * x) * v.dp * v.dp);
  }
  return r;
}

std::mutex cache_mutex;
std::map<std::tuple<int, double, double>, std::unique_ptr<Rule>>& cache() {
  static std::map<std::tuple<int, double, double>, std::unique_ptr<Rule>> c;
  return c;
}

}  // namespace

const Rule& gauss_jacobi(int n, double a, double b) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_tuple(n, a, b);
  auto it = cache().find(key);
  if (it != cache().end()) return *it->second;
  auto rule = std::make_unique<Rule>(build_jacobi(n, a, b));
  const Rule& ref = *rule;
  cache().emplace(key, std::move(rule));
  return ref;
}

const Rule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

Rule legendre_on(int n, double lo, double hi) {
  const Rule& g = gauss_legendre(n);
  Rule r = g;
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    r.x[i] = lo + half * (g.x[i] + 1.0);
    r.w[i] = half * g.w[i];
  }
  return r;
}

Rule jacobi_left_on(int n, double e, double lo, double hi) {
  const Rule& g = gauss_jacobi(n, 0.0, e);
  Rule r = g;
  const double half = 0.5 * (hi - lo);
  const double scale = std::pow(half, e + 1.0);
  for (int i = 0; i < n; ++i) {
    r.x[i] = lo + half * (g.x[i] + 1.0);
    r.w[i] = scale * g.w[i];
  }
  return r;
}

Rule jacobi_right_on(int n, double e, double lo, double hi) {
  const Rule& g = gauss_jacobi(n, e, 0.0);
  Rule r = g;
  const double half = 0.5 * (hi - lo);
  const double scale = std::pow(half, e + 1.0);
  for (int i = 0; i < n; ++i) {
    r.x[i] = lo + half * (g.x[i] + 1.0);
    r.w[i] = scale * g.w[i];
  }
  return r;
}

}  // namespace tfde
