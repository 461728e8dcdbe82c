#pragma once

#include <complex>

namespace tfde {

using cplx = std::complex<double>;

// E_{gamma,beta}(z) = sum z^n / Gamma(gamma n + beta), gamma > 0.
// Power series near the origin, Laplace transform inversion on an optimal parabolic contour elsewhere.
cplx scalar_ml(double gamma, double beta, cplx z);
double scalar_ml(double gamma, double beta, double z);

// t^{beta-1} E_{gamma,beta}(-q t^gamma)
double ml_kernel(double gamma, double beta, double q, double t);

}  // namespace tfde
