#include "tfde/tempered_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <string>
#include <vector>

#include "tfde/error.hpp"
#include "tfde/fft.hpp"
#include "tfde/quadrature.hpp"

namespace tfde {
namespace {

constexpr int kLowPoints = 12;
constexpr int kHighPoints = 20;
constexpr int kMaxPanels = 2000;

// integral of s^{e} g(s) over [lo, hi]; the weight is absorbed only when lo == 0
double panel(const RealFn& g, double e, double lo, double hi, int n) {
  double sum = 0.0;
  if (lo == 0.0) {
    const Rule r = jacobi_left_on(n, e, lo, hi);
    for (int i = 0; i < n; ++i) sum += r.w[i] * g(r.x[i]);
  } else {
    const Rule r = legendre_on(n, lo, hi);
    for (int i = 0; i < n; ++i) sum += r.w[i] * std::pow(r.x[i], e) * g(r.x[i]);
  }
  return sum;
}

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel make_panel(const RealFn& g, double e, double lo, double hi) {
  const double a = panel(g, e, lo, hi, kLowPoints);
  const double b = panel(g, e, lo, hi, kHighPoints);
  return {lo, hi, b, std::abs(a - b)};
}

// int_0^L s^{mu-1} g(s) ds / Gamma(mu), global bisection of the worst panel
double kernel_integral(const RealFn& g, double mu, double L, double tol) {
  if (L <= 0.0) return 0.0;
  const double e = mu - 1.0;
  std::priority_queue<Panel> heap;
  heap.push(make_panel(g, e, 0.0, L));
  double total = heap.top().value;
  double err = heap.top().error;
  const double gm = std::tgamma(mu);
  int count = 1;
  while (err > std::max(tol * gm, 1e-15 * std::abs(total))) {
    if (count >= kMaxPanels)
      throw Error(ErrorKind::AccuracyFailure, "tempered integral quadrature did not converge",
                  err / gm);
    const Panel w = heap.top();
    heap.pop();
    const double mid = 0.5 * (w.lo + w.hi);
    const Panel l = make_panel(g, e, w.lo, mid);
    const Panel r = make_panel(g, e, mid, w.hi);
    total += l.value + r.value - w.value;
    err += l.error + r.error - w.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // resum to avoid drift from incremental updates
  double sum = 0.0;
  std::vector<Panel> all;
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  for (const Panel& p : all) sum += p.value;
  return sum / gm;
}

void check_point(Interval I, double x) {
  if (!(I.a < I.b)) throw Error(ErrorKind::InvalidParameter, "interval requires a < b");
  if (x < I.a - 1e-14 || x > I.b + 1e-14)
    throw Error(ErrorKind::InvalidParameter, "evaluation point outside interval");
}

double kernel(double s, double nu, double lambda) {
  return std::pow(s, nu - 1.0) * std::exp(-lambda * s) / std::tgamma(nu);
}

double kernel_prime(double s, double nu, double lambda) {
  return ((nu - 1.0) / s - lambda) * kernel(s, nu, lambda);
}

// central differences of F at x, 8th order
struct Derivs {
  double d1;
  double d2;
};

Derivs central(const RealFn& F, double x, double h) {
  static const double c1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  static const double c2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  double d1 = 0.0;
  double d2 = c2[0] * F(x);
  for (int j = 1; j <= 4; ++j) {
    const double fp = F(x + j * h);
    const double fm = F(x - j * h);
    d1 += c1[j - 1] * (fp - fm);
    d2 += c2[j] * (fp + fm);
  }
  return {d1 / h, d2 / (h * h)};
}

Derivs numeric_derivs(const RealFn& F, Interval I, double x) {
  const double room = std::min(x - I.a, I.b - x);
  double h = std::min(2e-2 * I.length(), room / 4.5);
  if (h <= 0.0) throw Error(ErrorKind::InvalidParameter, "derivative requires an interior point");
  const Derivs coarse = central(F, x, h);
  const Derivs fine = central(F, x, 0.5 * h);
  const double scale = std::max({1.0, std::abs(fine.d1), std::abs(fine.d2)});
  const double diff = std::max(std::abs(coarse.d1 - fine.d1), std::abs(coarse.d2 - fine.d2));
  if (diff > 1e-5 * scale)
    throw Error(ErrorKind::AccuracyFailure, "function not smooth enough for differentiation",
                diff);
  return fine;
}

}  // namespace

double rgamma(double z) {
  if (z <= 0.0 && z == std::floor(z)) return 0.0;
  if (z > 170.0) return std::exp(-std::lgamma(z));
  return 1.0 / std::tgamma(z);
}

double left_tempered_integral(const RealFn& u, TemperParams p, Interval I, double x, double tol) {
  if (!(p.order > 0.0)) throw Error(ErrorKind::InvalidParameter, "integral order must be positive");
  if (p.lambda < 0.0) throw Error(ErrorKind::InvalidParameter, "lambda must be nonnegative");
  check_point(I, x);
  const double lam = p.lambda;
  auto g = [&](double s) { return std::exp(-lam * s) * u(x - s); };
  return kernel_integral(g, p.order, x - I.a, tol);
}

double right_tempered_integral(const RealFn& u, TemperParams p, Interval I, double x, double tol) {
  if (!(p.order > 0.0)) throw Error(ErrorKind::InvalidParameter, "integral order must be positive");
  if (p.lambda < 0.0) throw Error(ErrorKind::InvalidParameter, "lambda must be nonnegative");
  check_point(I, x);
  const double lam = p.lambda;
  auto g = [&](double s) { return std::exp(-lam * s) * u(x + s); };
  return kernel_integral(g, p.order, I.b - x, tol);
}

double tempered_rl_derivative(const SmoothFunction& u, TemperParams p, Interval I, double x,
                              Side side) {
  const double mu = p.order;
  const double lam = p.lambda;
  if (!(mu > 0.0 && mu <= 2.0))
    throw Error(ErrorKind::InvalidParameter, "derivative order must lie in (0, 2]");
  check_point(I, x);
  const int n = mu <= 1.0 ? 1 : 2;
  const double nu = n - mu;
  const double sgn = side == Side::Left ? 1.0 : -1.0;

  double F0 = 0.0, F1 = 0.0, F2 = 0.0;
  if (nu == 0.0) {
    F0 = u.f(x);
    if (u.df && (n < 2 || u.d2f)) {
      F1 = u.df(x);
      if (n == 2) F2 = u.d2f(x);
    } else {
      const Derivs d = numeric_derivs(u.f, I, x);
      F1 = d.d1;
      F2 = d.d2;
    }
  } else {
    const TemperParams q{nu, lam};
    auto integral = [&](const RealFn& v, double y) {
      return side == Side::Left ? left_tempered_integral(v, q, I, y)
                                : right_tempered_integral(v, q, I, y);
    };
    F0 = integral(u.f, x);
    const bool analytic = u.df && (n < 2 || u.d2f);
    if (analytic) {
      const double s = side == Side::Left ? x - I.a : I.b - x;
      const double end = side == Side::Left ? I.a : I.b;
      const double k0 = kernel(s, nu, lam);
      F1 = sgn * k0 * u.f(end) + integral(u.df, x);
      if (n == 2) {
        F2 = kernel_prime(s, nu, lam) * u.f(end) + sgn * k0 * u.df(end) + integral(u.d2f, x);
      }
    } else {
      const Derivs d = numeric_derivs([&](double y) { return integral(u.f, y); }, I, x);
      F1 = d.d1;
      F2 = d.d2;
    }
  }
  // left: (D + lam)^n F ; right: (-1)^n (D - lam)^n G
  if (n == 1) return sgn * (F1 + sgn * lam * F0);
  return F2 + 2.0 * sgn * lam * F1 + lam * lam * F0;
}

double tempered_deriv_reference(const SmoothFunction& u, TemperParams p, Interval I, double x,
                                Side side) {
  const double mu = p.order;
  const double lam = p.lambda;
  double v = tempered_rl_derivative(u, p, I, x, side) - std::pow(lam, mu) * u.f(x);
  if (mu > 1.0 && lam > 0.0) {
    double du;
    if (u.df) {
      du = u.df(x);
    } else {
      du = numeric_derivs(u.f, I, x).d1;
    }
    const double sgn = side == Side::Left ? 1.0 : -1.0;
    v -= sgn * mu * std::pow(lam, mu - 1.0) * du;
  }
  return v;
}

double tempered_caputo_reference(const SmoothFunction& u, TemperParams p, Interval I, double x) {
  if (!(p.order > 0.0 && p.order < 1.0))
    throw Error(ErrorKind::InvalidParameter, "Caputo order must lie in (0, 1)");
  if (!u.df) throw Error(ErrorKind::InvalidInput, "Caputo oracle needs the first derivative");
  const double lam = p.lambda;
  auto v = [&](double y) { return u.df(y) + lam * u.f(y); };
  return left_tempered_integral(v, {1.0 - p.order, lam}, I, x);
}

double tempered_power_rule(const TruncatedPowerTerm& t, double mu, double lambda, Interval I,
                           double x, Side side) {
  if (!(t.c > 0.0)) throw Error(ErrorKind::InvalidParameter, "truncated power scale must be positive");
  if (t.k < 0.0) throw Error(ErrorKind::InvalidParameter, "truncated power exponent must be >= 0");
  const double root = t.d / t.c;
  if (side == Side::Left && root < I.a - 1e-14)
    throw Error(ErrorKind::InvalidParameter, "truncated power root left of the interval");
  if (side == Side::Right && root > I.b + 1e-14)
    throw Error(ErrorKind::InvalidParameter, "truncated power root right of the interval");
  const double e = t.k - mu;
  if (e <= -1.0)
    throw Error(ErrorKind::InvalidParameter, "resulting exponent must exceed -1");
  const double base = side == Side::Left ? t.c * x - t.d : t.d - t.c * x;
  const double expo = t.tempered ? std::exp((side == Side::Left ? -1.0 : 1.0) * lambda * x) : 1.0;
  if (base <= 0.0) {
    if (base == 0.0 && e < 0.0) return HUGE_VAL;
    return 0.0;
  }
  const double coef = std::pow(t.c, mu) * std::exp(std::lgamma(t.k + 1.0)) * rgamma(e + 1.0);
  return coef * std::pow(base, e) * expo;
}

double power_action(const TruncatedPowerTerm& t, TemperParams p, Shift sign, Interval I, double x) {
  if (!(p.order > 1.0 && p.order <= 2.0))
    throw Error(ErrorKind::InvalidParameter, "power_action needs 1 < alpha <= 2");
  const double mu = sign == Shift::Derivative ? p.order - 1.0 : -(p.order - 1.0);
  const double lam = t.tempered ? p.lambda : 0.0;
  return tempered_power_rule(t, mu, lam, I, x, Side::Left);
}

double hat_profile(double y, double e) {
  auto pw = [e](double z) {
    if (z <= 0.0) return 0.0;
    return e == 0.0 ? 1.0 : std::pow(z, e);
  };
  return (pw(y) - 2.0 * pw(y - 1.0) + pw(y - 2.0)) * rgamma(e + 1.0);
}

double hat_action(int k, double h, Interval I, TemperParams p, Shift sign, double x) {
  const double alpha = p.order;
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw Error(ErrorKind::InvalidParameter, "hat_action needs 1 < alpha <= 2");
  if (k < 0) throw Error(ErrorKind::InvalidParameter, "basis index must be nonnegative");
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParameter, "mesh width must be positive");
  const double shift = sign == Shift::Derivative ? alpha - 1.0 : -(alpha - 1.0);
  const double e = 1.0 - shift;
  return std::exp(-p.lambda * x) * std::pow(h, -shift - 0.5) * hat_profile((x - I.a) / h - k, e);
}

double fourier_symbol_check(const SmoothFunction& u, TemperParams p, Interval box, int n_points) {
  const double mu = p.order;
  const double lam = p.lambda;
  if (mu < 0.0 || mu > 2.0) throw Error(ErrorKind::InvalidParameter, "symbol check order must lie in [0, 2]");
  if (n_points < 16) throw Error(ErrorKind::InvalidParameter, "too few grid points");
  const double L = box.length();
  const double dx = L / n_points;
  std::vector<cplx> U(n_points), V(n_points);
  double umax = 0.0;
  for (int j = 0; j < n_points; ++j) umax = std::max(umax, std::abs(u.f(box.a + j * dx)));
  if (std::abs(u.f(box.a)) > 1e-12 * umax || std::abs(u.f(box.b)) > 1e-12 * umax)
    throw Error(ErrorKind::InvalidInput, "support touches the periodic box boundary");

  const int n = mu <= 1.0 ? 1 : 2;
  const double nu = n - mu;
  RealFn inner;
  if (mu > 0.0) {
    if (!u.df || (n == 2 && !u.d2f))
      throw Error(ErrorKind::InvalidInput, "symbol check needs analytic derivatives");
    if (n == 1) {
      inner = [&](double y) { return u.df(y) + lam * u.f(y); };
    } else {
      inner = [&](double y) { return u.d2f(y) + 2.0 * lam * u.df(y) + lam * lam * u.f(y); };
    }
  }
  for (int j = 0; j < n_points; ++j) {
    const double x = box.a + j * dx;
    U[j] = u.f(x);
    if (mu == 0.0) {
      V[j] = u.f(x);
    } else if (nu == 0.0) {
      V[j] = inner(x);
    } else {
      V[j] = j == 0 ? 0.0 : left_tempered_integral(inner, {nu, lam}, box, x);
    }
  }
  FftPlan plan(n_points);
  plan.forward(U.data());
  plan.forward(V.data());
  double umag = 0.0;
  for (const auto& z : U) umag = std::max(umag, std::abs(z));
  double dev = 0.0;
  for (int k = 0; k < n_points; ++k) {
    const int ks = k < n_points / 2 ? k : k - n_points;
    const double w = 2.0 * M_PI * ks / L;
    const cplx symbol = mu == 0.0 ? cplx(1.0) : std::pow(cplx(lam, w), mu);
    dev = std::max(dev, std::abs(V[k] - symbol * U[k]));
  }
  return dev / umag;
}

}  // namespace tfde
