#include <cmath>

#include "tfde/error.hpp"
#include "tfde/fem_space.hpp"
#include "tfde/quadrature.hpp"

namespace tfde {

MotherFunction linear_hat() {
  MotherFunction m;
  m.ncells = 2;
  m.cells[0] = {0.0, 1.0, 0.0};
  m.cells[1] = {1.0, -1.0, 0.0};
  return m;
}

MotherFunction quadratic_node() {
  MotherFunction m;
  m.ncells = 2;
  m.cells[0] = {0.0, -1.0, 2.0};
  m.cells[1] = {1.0, -3.0, 2.0};
  return m;
}

MotherFunction quadratic_bubble() {
  MotherFunction m;
  m.ncells = 1;
  m.cells[0] = {0.0, 4.0, -4.0};
  return m;
}

namespace {

inline double pval(const std::array<double, 3>& c, double t) { return c[0] + t * (c[1] + t * c[2]); }
inline double dval(const std::array<double, 3>& c, double t) { return c[1] + 2.0 * c[2] * t; }

constexpr int kCorrelationPoints = 4;
constexpr int kKernelPoints = 20;

// C(s) = int P(xi) Q(xi + s) dxi over the overlap of the two unit cells
double correlation(const std::array<double, 3>& trial, const std::array<double, 3>& test, double lh,
                   double s) {
  const double lo = std::max(0.0, -s), hi = std::min(1.0, 1.0 - s);
  if (hi <= lo) return 0.0;
  const Rule& g = gauss_legendre(kCorrelationPoints);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  double acc = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const double xi = mid + half * g.x[k];
    const double P = dval(trial, xi) + lh * pval(trial, xi);
    const double Q = dval(test, xi + s) - lh * pval(test, xi + s);
    acc += g.w[k] * P * Q;
  }
  return acc * half;
}

// exact lambda = 0 hat entries
double linear_closed_form(int d, double alpha, double h) {
  static const double c[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
  double s = 0.0;
  for (int k = -2; k <= 2; ++k) {
    const double y = d + k;
    if (y > 0) s += c[k + 2] * std::pow(y, 3.0 - alpha);
  }
  return s * std::pow(h, -alpha) / std::tgamma(4.0 - alpha);
}

}  // namespace

double fractional_entry(const MotherFunction& test, const MotherFunction& trial, int d, double alpha,
                        double lambda, double h) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(ErrorKind::InvalidParameter, "entry order must lie in (0,2]");
  if (d <= -test.ncells) return 0.0;
  const double lh = lambda * h;
  if (alpha == 2.0) {
    double tot = 0.0;
    const Rule& g = gauss_legendre(kCorrelationPoints);
    for (int p = 0; p < test.ncells; ++p)
      for (int q = 0; q < trial.ncells; ++q) {
        if (d + p - q != 0) continue;
        for (int k = 0; k < g.size(); ++k) {
          const double t = 0.5 * (1.0 + g.x[k]);
          const double P = dval(trial.cells[q], t) + lh * pval(trial.cells[q], t);
          const double Q = dval(test.cells[p], t) - lh * pval(test.cells[p], t);
          tot += 0.5 * g.w[k] * P * Q;
        }
      }
    return -tot / (h * h);
  }
  const double e = 1.0 - alpha;
  const Rule jr = jacobi_left_on(kKernelPoints, e, 0.0, 1.0);
  const Rule lr = legendre_on(kKernelPoints, 0.0, 1.0);
  double tot = 0.0;
  for (int p = 0; p < test.ncells; ++p)
    for (int q = 0; q < trial.ncells; ++q) {
      const int m = d + p - q;
      for (int half = 0; half < 2; ++half) {
        const double slo = half == 0 ? -1.0 : 0.0;
        const int ylo = m + (half == 0 ? -1 : 0);
        if (ylo + 1 <= 0) continue;
        if (ylo == 0) {
          const Rule& r = jr;
          for (int k = 0; k < r.size(); ++k) {
            const double y = r.x[k];
            tot += r.w[k] * std::exp(-lh * y) * correlation(trial.cells[q], test.cells[p], lh, slo + y);
          }
        } else {
          const Rule& r = lr;
          for (int k = 0; k < r.size(); ++k) {
            const double y = ylo + r.x[k];
            tot += r.w[k] * std::pow(y, e) * std::exp(-lh * y) *
                   correlation(trial.cells[q], test.cells[p], lh, slo + r.x[k]);
          }
        }
      }
    }
  const double v = -std::pow(h, -alpha) / std::tgamma(2.0 - alpha) * tot;
  if (!std::isfinite(v)) throw Error(ErrorKind::AccuracyFailure, "non-finite fractional entry", d);
  return v;
}

namespace {

struct EntryTask {
  int block;
  int d;
};

double entry_for(const MotherFunction& test, const MotherFunction& trial, bool linear_exact, int d,
                 double alpha, double lambda, double h) {
  if (linear_exact) return linear_closed_form(d, alpha, h);
  return fractional_entry(test, trial, d, alpha, lambda, h);
}

}  // namespace

BlockToeplitzOperator assemble_fractional_toeplitz(const UniformMesh& mesh, BasisKind kind, double alpha,
                                                   double lambda, Side side, Exec exec) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(ErrorKind::InvalidParameter, "order must lie in (0,2]");
  if (lambda < 0.0) throw Error(ErrorKind::InvalidParameter, "tempering must be nonnegative");
  BasisFamily basis{kind};
  const auto mothers = basis.mothers();
  const auto sizes = basis.family_sizes(mesh);
  const int nf = static_cast<int>(mothers.size());
  const bool linear_exact = kind == BasisKind::Linear && lambda == 0.0 && alpha < 2.0;

  // per block: column d = 0..rows-1, row d = 0..-(cols-1)
  std::vector<std::vector<double>> cols(nf * nf), rows(nf * nf);
  for (int r = 0; r < nf; ++r)
    for (int c = 0; c < nf; ++c) {
      cols[r * nf + c].assign(sizes[r], 0.0);
      rows[r * nf + c].assign(sizes[c], 0.0);
    }
  auto store = [&](int b, int d, double v) {
    if (d >= 0) cols[b][d] = v;
    if (d <= 0) rows[b][-d] = v;
  };

  if (exec == Exec::Serial) {
    for (int r = 0; r < nf; ++r)
      for (int c = 0; c < nf; ++c)
        for (int d = -(sizes[c] - 1); d < sizes[r]; ++d) {
          if (d <= -mothers[r].ncells) continue;
          store(r * nf + c, d, entry_for(mothers[r], mothers[c], linear_exact, d, alpha, lambda, mesh.h));
        }
  } else {
    std::vector<EntryTask> tasks;
    for (int r = 0; r < nf; ++r)
      for (int c = 0; c < nf; ++c)
        for (int d = -(sizes[c] - 1); d < sizes[r]; ++d)
          if (d > -mothers[r].ncells) tasks.push_back({r * nf + c, d});
    std::vector<double> vals(tasks.size());
    const int nt = static_cast<int>(tasks.size());
    bool failed = false;
    int worst = 0;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nt; ++t) {
      const int b = tasks[t].block;
      try {
        vals[t] = entry_for(mothers[b / nf], mothers[b % nf], linear_exact, tasks[t].d, alpha, lambda, mesh.h);
      } catch (const Error&) {
#pragma omp critical
        {
          worst = failed ? std::min(worst, tasks[t].d) : tasks[t].d;
          failed = true;
        }
      }
    }
    if (failed) throw Error(ErrorKind::AccuracyFailure, "fractional entry quadrature failed", worst);
    for (int t = 0; t < nt; ++t) store(tasks[t].block, tasks[t].d, vals[t]);
  }

  std::vector<ToeplitzOperator> blocks;
  for (int b = 0; b < nf * nf; ++b) blocks.emplace_back(cols[b], rows[b]);
  BlockToeplitzOperator left(nf, nf, std::move(blocks));
  return side == Side::Left ? left : left.transposed();
}

}  // namespace tfde
