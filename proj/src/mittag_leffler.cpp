#include "tfde/mittag_leffler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "tfde/error.hpp"

namespace tfde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogEps = std::log(std::numeric_limits<double>::epsilon());

cplx series(double gamma, double beta, cplx z) {
  cplx sum = 0.0, zn = 1.0;
  for (int n = 0; n < 400; ++n) {
    const double arg = gamma * n + beta;
    // 1/Gamma vanishes at the poles
    const double rg = (arg <= 0.0 && arg == std::floor(arg)) ? 0.0 : 1.0 / std::tgamma(arg);
    const cplx term = zn * rg;
    sum += term;
    if (n > 2 && std::abs(term) <= 1e-17 * std::abs(sum)) break;
    zn *= z;
  }
  return sum;
}

struct Param {
  double mu = 0.0, h = 0.0, N = kInf;
};

// contour parameters for a region bounded by two singularities
Param optimal_bounded(double t, double phi_j, double phi_j1, double pj, double qj, double log_epsilon) {
  const double fac = 1.01;
  const double f_max = std::exp(log_epsilon - kLogEps);
  const double sq_j = std::sqrt(phi_j);
  const double threshold = 2.0 * std::sqrt((log_epsilon - kLogEps) / t);
  const double sq_j1 = std::min(std::sqrt(phi_j1), threshold - sq_j);
  double sqb_j = 0.0, sqb_j1 = 0.0, f_bar = 1.0;
  bool admissible = false;
  if (pj < 1e-14 && qj < 1e-14) {
    sqb_j = sq_j;
    sqb_j1 = sq_j1;
    admissible = true;
  } else if (pj < 1e-14) {
    sqb_j = sq_j;
    const double f_min = sq_j > 0.0 ? fac * std::pow(sq_j / (sq_j1 - sq_j), qj) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fq = std::pow(f_bar, -1.0 / qj);
      sqb_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq);
      admissible = true;
    }
  } else if (qj < 1e-14) {
    sqb_j1 = sq_j1;
    const double f_min = fac * std::pow(sq_j1 / (sq_j1 - sq_j), pj);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj);
      sqb_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp);
      admissible = true;
    }
  } else {
    double f_min = fac * (sq_j + sq_j1) / std::pow(sq_j1 - sq_j, std::max(pj, qj));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj), fq = std::pow(f_bar, -1.0 / qj);
      const double w = -phi_j1 * t / log_epsilon;
      const double den = 2.0 + w - (1.0 + w) * fp + fq;
      sqb_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
      sqb_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
      admissible = true;
    }
  }
  Param out;
  if (!admissible) return out;
  const double le = log_epsilon - std::log(f_bar);
  const double w = -sqb_j1 * sqb_j1 * t / le;
  out.mu = std::pow(((1.0 + w) * sqb_j + sqb_j1) / (2.0 + w), 2);
  out.h = -2.0 * kPi / le * (sqb_j1 - sqb_j) / ((1.0 + w) * sqb_j + sqb_j1);
  out.N = std::ceil(std::sqrt(1.0 - le / t / out.mu) / out.h);
  return out;
}

// contour parameters for the unbounded region right of the last singularity
Param optimal_unbounded(double t, double phi_j, double pj, double log_epsilon) {
  const double sq_phi_j = std::sqrt(phi_j);
  double phibar = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
  double sq_phibar = std::sqrt(phibar);
  const double f_min = 1.0, f_max = 10.0, f_tar = 5.0;
  double N = 0.0, A = 0.0, sq_mu = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double phi_t = phibar * t, le_phi_t = log_epsilon / phi_t;
    N = std::ceil(phi_t / kPi * (1.0 - 1.5 * le_phi_t + std::sqrt(1.0 - 2.0 * le_phi_t)));
    A = kPi * N / phi_t;
    sq_mu = sq_phibar * std::abs(4.0 - A) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * A));
    const double fbar = std::pow((sq_phibar - sq_phi_j) / sq_mu, -pj);
    if (pj < 1e-14 || (f_min < fbar && fbar < f_max)) break;
    sq_phibar = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
    phibar = sq_phibar * sq_phibar;
  }
  Param out;
  out.mu = sq_mu * sq_mu;
  out.h = (-3.0 * A - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * A)) / (4.0 - A) / N;
  out.N = N;
  const double threshold = (log_epsilon - kLogEps) / t;
  if (out.mu > threshold) {
    const double Q = std::abs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(out.mu);
    const double pb = std::pow(Q + sq_phi_j, 2);
    if (pb < threshold) {
      const double w = std::sqrt(kLogEps / (kLogEps - log_epsilon));
      const double u = std::sqrt(-pb * t / kLogEps);
      out.mu = threshold;
      out.N = std::ceil(w * log_epsilon / 2.0 / kPi / (u * w - 1.0));
      out.h = std::sqrt(kLogEps / (kLogEps - log_epsilon)) / out.N;
    } else {
      out.N = kInf;
      out.h = 0.0;
    }
  }
  return out;
}

cplx lt_inversion(double alpha, double beta, cplx lambda) {
  double log_epsilon = std::log(1e-15);
  const double theta = std::arg(lambda);
  const int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / 2.0 / kPi));
  const int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / 2.0 / kPi));
  struct Pole {
    cplx s;
    double phi;
  };
  std::vector<Pole> poles;
  const double rad = std::pow(std::abs(lambda), 1.0 / alpha);
  for (int k = kmin; k <= kmax; ++k) {
    const cplx s = std::polar(rad, (theta + 2.0 * k * kPi) / alpha);
    const double phi = 0.5 * (s.real() + std::abs(s));
    if (phi > 1e-15) poles.push_back({s, phi});
  }
  std::stable_sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.phi < b.phi; });

  // singularities: origin then poles
  std::vector<cplx> s_star{0.0};
  std::vector<double> phi{0.0};
  for (const auto& p : poles) {
    s_star.push_back(p.s);
    phi.push_back(p.phi);
  }
  const int J1 = static_cast<int>(s_star.size());
  std::vector<double> pp(J1), qq(J1);
  pp[0] = std::max(0.0, -2.0 * (alpha - beta + 1.0));
  for (int j = 1; j < J1; ++j) pp[j] = 1.0;
  for (int j = 0; j < J1 - 1; ++j) qq[j] = 1.0;
  qq[J1 - 1] = kInf;
  phi.push_back(kInf);

  const double t = 1.0;
  std::vector<int> regions;
  for (int j = 0; j < J1; ++j)
    if (phi[j] < (log_epsilon - kLogEps) / t && phi[j] < phi[j + 1]) regions.push_back(j);
  if (regions.empty()) throw Error(ErrorKind::AccuracyFailure, "no admissible region for Mittag-Leffler inversion");

  std::vector<Param> params(J1);
  for (int attempt = 0; attempt < 20; ++attempt) {
    double best = kInf;
    for (int j : regions) {
      params[j] = j < J1 - 1 ? optimal_bounded(t, phi[j], phi[j + 1], pp[j], qq[j], log_epsilon)
                             : optimal_unbounded(t, phi[j], pp[j], log_epsilon);
      best = std::min(best, params[j].N);
    }
    if (best <= 200) break;
    log_epsilon += std::log(10.0);
  }
  int iN = -1;
  for (int j : regions)
    if (iN < 0 || params[j].N < params[iN].N) iN = j;
  const Param& P = params[iN];
  if (!std::isfinite(P.N)) throw Error(ErrorKind::AccuracyFailure, "Mittag-Leffler contour selection failed");

  const int N = static_cast<int>(P.N);
  cplx integral = 0.0;
  for (int k = -N; k <= N; ++k) {
    const double u = P.h * k;
    const cplx z = P.mu * std::pow(cplx(1.0, u), 2);
    const cplx zd = cplx(-2.0 * P.mu * u, 2.0 * P.mu);
    const cplx F = std::pow(z, alpha - beta) / (std::pow(z, alpha) - lambda) * zd;
    integral += std::exp(z * t) * F;
  }
  integral *= P.h / (2.0 * kPi * cplx(0.0, 1.0));
  cplx residues = 0.0;
  for (int j = iN + 1; j < J1; ++j) residues += 1.0 / alpha * std::pow(s_star[j], 1.0 - beta) * std::exp(t * s_star[j]);
  return integral + residues;
}

}  // namespace

cplx scalar_ml(double gamma, double beta, cplx z) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidParameter, "Mittag-Leffler order must be positive");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error(ErrorKind::InvalidInput, "non-finite argument");
  if (std::abs(z) < 1e-15) return 1.0 / std::tgamma(beta);
  if (gamma == 1.0 && beta == 1.0) return std::exp(z);
  if (std::abs(z) < 1.0) return series(gamma, beta, z);
  return lt_inversion(gamma, beta, z);
}

double scalar_ml(double gamma, double beta, double z) {
  return scalar_ml(gamma, beta, cplx(z, 0.0)).real();
}

double ml_kernel(double gamma, double beta, double q, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "kernel time must be positive");
  return std::pow(t, beta - 1.0) * scalar_ml(gamma, beta, -q * std::pow(t, gamma));
}

}  // namespace tfde
