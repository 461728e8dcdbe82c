#pragma once

#include <functional>

namespace tfde {

struct TemperParams {
  double order = 0.0;
  double lambda = 0.0;
};

struct Interval {
  double a = 0.0;
  double b = 1.0;
  double length() const { return b - a; }
};

// Left: e^{-lambda x} (c x - d)_+^k.  Right-sided rules read it as e^{lambda x} (d - c x)_+^k.
struct TruncatedPowerTerm {
  double c = 1.0;
  double d = 0.0;
  double k = 0.0;
  bool tempered = true;
};

enum class Side { Left, Right };

// Derivative: exponent lowered by alpha-1.  Integral: exponent raised by alpha-1.
enum class Shift { Derivative, Integral };

using RealFn = std::function<double(double)>;

// df and d2f may be left empty; numerical differentiation is used instead.
struct SmoothFunction {
  RealFn f;
  RealFn df;
  RealFn d2f;
};

double rgamma(double z);

double left_tempered_integral(const RealFn& u, TemperParams p, Interval I, double x,
                              double tol = 1e-13);
double right_tempered_integral(const RealFn& u, TemperParams p, Interval I, double x,
                               double tol = 1e-13);

// Blackboard derivative (d/dx + lambda)^n applied to the order n-mu integral, 0 < mu <= 2.
double tempered_rl_derivative(const SmoothFunction& u, TemperParams p, Interval I, double x,
                              Side side = Side::Left);

// Normalized derivative with the lambda^mu u and mu lambda^{mu-1} u' corrections.
double tempered_deriv_reference(const SmoothFunction& u, TemperParams p, Interval I, double x,
                                Side side = Side::Left);

// Left tempered Caputo derivative of order 0 < gamma < 1.
double tempered_caputo_reference(const SmoothFunction& u, TemperParams p, Interval I, double x);

// Closed-form tempered operator of signed order mu (mu > 0 derivative, mu < 0 integral).
double tempered_power_rule(const TruncatedPowerTerm& t, double mu, double lambda, Interval I,
                           double x, Side side = Side::Left);

// Order +-(alpha-1) action on a truncated power, p.order = alpha.
double power_action(const TruncatedPowerTerm& t, TemperParams p, Shift sign, Interval I,
                    double x);

// Order +-(alpha-1) action on e^{-lambda x} phi_{h,k}(x) for the normalized hat.
double hat_action(int k, double h, Interval I, TemperParams p, Shift sign, double x);

// The scaled profile J(y) used by hat_action.
double hat_profile(double y, double exponent);

// Max relative deviation between the DFT of the whole-line operator applied in space
// and (lambda + i w)^mu times the DFT of u.
double fourier_symbol_check(const SmoothFunction& u, TemperParams p, Interval box,
                            int n_points);

}  // namespace tfde
