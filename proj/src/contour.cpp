#include "tfde/contour.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tfde/error.hpp"
#include "tfde/mittag_leffler.hpp"

namespace tfde {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

bool is_symmetric(const Eigen::MatrixXd& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
}
}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::CF: return "cf";
    case Scheme::PC: return "pc";
    case Scheme::DTI: return "dti";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "cf") return Scheme::CF;
  if (l == "pc") return Scheme::PC;
  if (l == "dti") return Scheme::DTI;
  throw Error(ErrorKind::InvalidParameter, "unknown contour scheme '" + s + "'");
}

// ---------------------------------------------------------------- CF

ContourRule cf_nodes(int n1) {
  if (n1 < 8 || n1 > 20 || n1 % 2 != 0) throw Error(ErrorKind::InvalidParameter, "CF degree must be even in [8,20]", n1);
  const int K = 75, nf = 1024;
  const double scl = 9.0;
  // Chebyshev coefficients of exp transplanted to [-1,1], cosine sum in extended precision
  std::vector<double> c(K + 2);
  for (int k = 0; k <= K + 1; ++k) {
    long double acc = 0.0L;
    for (int j = 0; j < nf; ++j) {
      const long double t = cosl(2.0L * std::numbers::pi_v<long double> * j / nf);
      const long double F = expl(scl * (t - 1.0L) / (t + 1.0L + 1e-16L));
      acc += F * cosl(2.0L * std::numbers::pi_v<long double> * ((static_cast<long>(j) * k) % nf) / nf);
    }
    c[k] = static_cast<double>(acc / nf);
  }

  // H is symmetric: singular pairs from its eigenpairs ordered by modulus
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; i + j < K; ++j) H(i, j) = c[1 + i + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hes(H);
  std::vector<int> order(K);
  for (int i = 0; i < K; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(hes.eigenvalues()(a)) > std::abs(hes.eigenvalues()(b));
  });
  const double s = std::abs(hes.eigenvalues()(order[n1]));
  const Eigen::VectorXd v = hes.eigenvectors().col(order[n1]);

  // roots of v_0 x^{K-1} + ... + v_{K-1}
  int lead = 0;
  while (lead < K - 1 && std::abs(v(lead)) < 1e-300) ++lead;
  const int deg = K - 1 - lead;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int j = 0; j < deg; ++j) comp(0, j) = -v(lead + 1 + j) / v(lead);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<cplx> poles;
  for (int i = 0; i < deg; ++i) {
    const cplx q = es.eigenvalues()(i);
    if (std::abs(q) > 1.0) poles.push_back(scl * (q - 1.0) * (q - 1.0) / ((q + 1.0) * (q + 1.0)));
  }
  if (static_cast<int>(poles.size()) != n1)
    throw Error(ErrorKind::AccuracyFailure, "CF Hankel singular vector is unresolved at this degree", s);

  ContourRule rule;
  rule.scheme = Scheme::CF;
  rule.n1 = n1;
  for (const auto& z : poles)
    if (z.imag() > 0.0) rule.nodes.push_back(z);
  std::sort(rule.nodes.begin(), rule.nodes.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  const int m = static_cast<int>(rule.nodes.size());
  if (2 * m != n1) throw Error(ErrorKind::AccuracyFailure, "CF poles are not in conjugate pairs", s);

  // residues by least squares on the transplanted Chebyshev grid, r = sum 2 Re(c_k / (x - z_k))
  const int ns = 4000;
  Eigen::MatrixXd A(ns, 2 * m);
  Eigen::VectorXd rhs(ns);
  for (int i = 0; i < ns; ++i) {
    const double t = std::cos(kPi * (i + 0.5) / ns);
    const double x = scl * (t - 1.0) / (t + 1.0);
    for (int k = 0; k < m; ++k) {
      const cplx r = 1.0 / (x - rule.nodes[k]);
      A(i, k) = 2.0 * r.real();
      A(i, m + k) = -2.0 * r.imag();
    }
    rhs(i) = std::exp(x);
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(rhs);
  for (int k = 0; k < m; ++k) rule.weights.push_back(-2.0 * cplx(coef(k), coef(m + k)));
  rule.predicted_error = cf_max_error(rule);
  if (rule.predicted_error > 100.0 * s + 1e-12)
    throw Error(ErrorKind::AccuracyFailure, "CF approximation error exceeds the Hankel estimate",
                rule.predicted_error);
  return rule;
}

double cf_max_error(const ContourRule& rule, double zmax, int samples) {
  if (rule.scheme != Scheme::CF) throw Error(ErrorKind::InvalidParameter, "not a CF rule");
  double worst = 0.0;
  auto err = [&](double x) {
    cplx r = 0.0;
    for (size_t k = 0; k < rule.nodes.size(); ++k) r += -0.5 * rule.weights[k] / (x - rule.nodes[k]);
    worst = std::max(worst, std::abs(2.0 * r.real() - std::exp(x)));
  };
  // half logarithmic, half linear near the origin
  for (int i = 0; i < samples / 2; ++i) err(-std::pow(10.0, -6.0 + (std::log10(zmax) + 6.0) * i / (samples / 2 - 1)));
  for (int i = 0; i < samples - samples / 2; ++i) err(-50.0 * i / (samples - samples / 2 - 1));
  return worst;
}

// ---------------------------------------------------------------- PC

ContourRule pc_nodes(double gamma, double beta, int n1) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidParameter, "PC order must lie in (0,1]");
  if (!(beta >= 0.5)) throw Error(ErrorKind::InvalidParameter, "PC quadrature requires beta >= 1/2", beta);
  if (n1 < 4 || n1 > 200) throw Error(ErrorKind::InvalidParameter, "PC node count out of range", n1);
  const double N = n1;
  // sigma(tau) balances the left-strip and truncation terms; bisect on the right-strip term
  auto sigma_of = [&](double tau) { return kPi / (tau * (N * tau + 1.0)); };
  auto gap = [&](double tau) {
    const double s = sigma_of(tau);
    return s * (1.0 - N * N * tau * tau) + 2.0 * kPi / tau;
  };
  double lo = 1.0 / N + 1e-12, hi = 1.0;
  if (gap(lo) * gap(hi) > 0.0) throw Error(ErrorKind::AccuracyFailure, "PC balance has no root", n1);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((gap(lo) > 0.0) == (gap(mid) > 0.0)) lo = mid;
    else hi = mid;
  }
  ContourRule rule;
  rule.scheme = Scheme::PC;
  rule.n1 = n1;
  rule.tau = 0.5 * (lo + hi);
  rule.sigma = sigma_of(rule.tau);
  rule.predicted_error = std::exp(-2.0 * kPi / rule.tau);
  // z^{-beta} e^z peaks near z = beta: widen the parabola
  const double widen = std::max(1.0, (beta + 3.0) / 4.0);
  rule.sigma *= widen;
  rule.tau /= std::sqrt(widen);
  if (!(rule.sigma * rule.tau < kPi)) throw Error(ErrorKind::AccuracyFailure, "PC parameters violate sigma tau < pi");
  for (int k = 0; k <= n1; ++k) {
    const double p = k * rule.tau;
    const cplx z = rule.sigma * std::pow(cplx(1.0, p), 2);
    const cplx dz = 2.0 * kI * rule.sigma * cplx(1.0, p);
    const double nu = k == 0 ? 1.0 : 2.0;
    rule.nodes.push_back(k == 0 ? cplx(rule.sigma, 0.0) : z);
    rule.weights.push_back(rule.tau * nu * dz * std::exp(z) / (2.0 * kPi * kI));
  }
  return rule;
}

// ---------------------------------------------------------------- DTI

ContourRule dti_nodes(double sigma_min, double sigma_max, double power) {
  if (!(sigma_min > 0.0) || !(sigma_max >= sigma_min) || !std::isfinite(sigma_max))
    throw Error(ErrorKind::InvalidContour, "DTI contour needs 0 < sigma_min <= sigma_max");
  if (!(power > 0.0 && power <= 1.0)) throw Error(ErrorKind::InvalidParameter, "DTI power must lie in (0,1]");
  ContourRule rule;
  rule.scheme = Scheme::DTI;
  rule.power = power;
  rule.sigma_min = sigma_min;
  rule.sigma_max = sigma_max;
  const double lk = std::log(sigma_max / sigma_min);
  rule.n1 = 10 * static_cast<int>(std::ceil(lk + 3.0));
  rule.center = 0.5 * (std::log(sigma_min) + std::log(sigma_max));
  rule.focal = 0.5 * lk + 0.25;
  const double half_width = 1.4;
  // no wider than half the strip for narrow spectra
  rule.eta = std::min(std::asinh(half_width / rule.focal), 0.5 * std::asinh(kPi / rule.focal));
  const int N = rule.n1;
  for (int j = 0; j < N / 2; ++j) {
    const double th = 2.0 * kPi * (j + 0.5) / N;
    const cplx w = rule.center + rule.focal * std::cosh(cplx(rule.eta, th));
    const cplx z = std::exp(w);
    const cplx dw = kI * rule.focal * std::sinh(cplx(rule.eta, th));
    rule.nodes.push_back(z);
    rule.weights.push_back(2.0 * z * dw / (kI * double(N)));
  }
  // distance of the log-plane ellipse from the spectrum interval and from the negative axis
  rule.predicted_error = std::exp(-N * std::min(rule.eta, std::asinh(kPi / rule.focal) - rule.eta));
  return rule;
}

// ---------------------------------------------------------------- pencils

SparsePencil::SparsePencil(Eigen::SparseMatrix<double> M, Eigen::SparseMatrix<double> S)
    : M_(std::move(M)), S_(std::move(S)) {
  if (M_.rows() != M_.cols() || S_.rows() != S_.cols() || M_.rows() != S_.rows())
    throw Error(ErrorKind::DimensionMismatch, "pencil matrices must be square and of equal size");
  M_.makeCompressed();
  S_.makeCompressed();
  const Eigen::SparseMatrix<double> dm = M_ - Eigen::SparseMatrix<double>(M_.transpose());
  const Eigen::SparseMatrix<double> ds = S_ - Eigen::SparseMatrix<double>(S_.transpose());
  symmetric_ = dm.norm() <= 1e-12 * M_.norm() && ds.norm() <= 1e-12 * S_.norm();
}

Eigen::MatrixXcd SparsePencil::solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const {
  Eigen::SparseMatrix<cplx> A = M_.cast<cplx>() * a + S_.cast<cplx>() * b;
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "shifted sparse system is singular");
  Eigen::MatrixXcd X = lu.solve(R);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "shifted sparse solve failed");
  return X;
}

DensePencil::DensePencil(Eigen::MatrixXd M, Eigen::MatrixXd S) : M_(std::move(M)), S_(std::move(S)) {
  if (M_.rows() != M_.cols() || S_.rows() != S_.cols() || M_.rows() != S_.rows())
    throw Error(ErrorKind::DimensionMismatch, "pencil matrices must be square and of equal size");
  symmetric_ = is_symmetric(M_) && is_symmetric(S_);
}

Eigen::MatrixXcd DensePencil::solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const {
  const Eigen::MatrixXcd A = a * M_.cast<cplx>() + b * S_.cast<cplx>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const auto d = lu.matrixLU().diagonal().cwiseAbs();
  if (d.minCoeff() <= 1e-14 * d.maxCoeff()) throw Error(ErrorKind::SingularMatrix, "shifted dense system is singular");
  return lu.solve(R);
}

DiagonalPencil::DiagonalPencil(Eigen::VectorXd m, Eigen::VectorXd s) : m_(std::move(m)), s_(std::move(s)) {
  if (m_.size() != s_.size()) throw Error(ErrorKind::DimensionMismatch, "diagonal pencil size mismatch");
}

Eigen::MatrixXcd DiagonalPencil::solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const {
  Eigen::MatrixXcd X(R.rows(), R.cols());
  for (int i = 0; i < R.rows(); ++i) {
    const cplx d = a * m_(i) + b * s_(i);
    if (d == 0.0) throw Error(ErrorKind::SingularMatrix, "shifted diagonal system is singular", i);
    X.row(i) = R.row(i) / d;
  }
  return X;
}

GmresPencil::GmresPencil(Eigen::SparseMatrix<double> M, LinearMap<cplx> S, double tol, int max_iter)
    : M_(std::move(M)), S_(std::move(S)), tol_(tol), max_iter_(max_iter) {}

Eigen::VectorXd GmresPencil::stiffness_apply(const Eigen::VectorXd& v) const {
  return S_(v.cast<cplx>()).real();
}

Eigen::MatrixXd GmresPencil::dense_stiffness() const {
  const int n = size();
  Eigen::MatrixXd D(n, n);
  for (int j = 0; j < n; ++j) D.col(j) = stiffness_apply(Eigen::VectorXd::Unit(n, j));
  return D;
}

Eigen::MatrixXcd GmresPencil::solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const {
  const Eigen::SparseMatrix<cplx> Mc = M_.cast<cplx>();
  LinearMap<cplx> op = [&](const Eigen::VectorXcd& x) {
    Eigen::VectorXcd y = a * (Mc * x);
    y += b * S_(x);
    return y;
  };
  Eigen::MatrixXcd X(R.rows(), R.cols());
  for (int j = 0; j < R.cols(); ++j) {
    GmresReport rep;
    X.col(j) = gmres<cplx>(op, R.col(j), tol_, max_iter_, rep);
    if (!rep.converged)
      throw Error(ErrorKind::AccuracyFailure, "shifted GMRES did not converge", rep.residual_history.back());
  }
  return X;
}

std::pair<double, double> spectral_bounds(const Pencil& pencil) {
  if (!pencil.symmetric())
    throw Error(ErrorKind::InvalidModel, "spectral bounds need a symmetric pencil (non-real eigenvalues)");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(pencil.dense_stiffness(), pencil.dense_mass(),
                                                               Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::IndefiniteForm, "mass matrix is not positive definite");
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw Error(ErrorKind::IndefiniteForm, "stiffness is not positive definite", lo);
  return {lo, hi};
}

// ---------------------------------------------------------------- application

namespace {

struct Task {
  int group;
  int node;
  bool conjugate;
};

cplx node_factor(const ContourRule& rule, double gamma, double K, const MlTerm& term, cplx z) {
  if (rule.scheme == Scheme::DTI) {
    const cplx arg = -K * std::pow(term.t, gamma) * std::pow(z, rule.power);
    return std::pow(term.t, term.beta - 1.0) * scalar_ml(gamma, term.beta, arg);
  }
  return std::pow(term.t, term.beta - 1.0) * std::pow(z, gamma - term.beta);
}

}  // namespace

Eigen::VectorXd ml_apply(const ContourRule& rule, double gamma, double K, const Pencil& pencil,
                         const std::vector<MlTerm>& terms, const MlOptions& opts) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidParameter, "time order must lie in (0,1]");
  if (!(K > 0.0)) throw Error(ErrorKind::InvalidParameter, "diffusion coefficient must be positive");
  if (rule.nodes.empty() || rule.nodes.size() != rule.weights.size())
    throw Error(ErrorKind::InvalidContour, "empty or inconsistent contour rule");
  const int n = pencil.size();
  for (const auto& tm : terms) {
    if (tm.v.size() != n) throw Error(ErrorKind::DimensionMismatch, "ml_apply vector size mismatch");
    if (!(tm.t > 0.0)) throw Error(ErrorKind::InvalidParameter, "ml_apply needs t > 0", tm.t);
    if (!(tm.beta > 0.0)) throw Error(ErrorKind::InvalidParameter, "ml_apply needs beta > 0", tm.beta);
    if (rule.scheme == Scheme::PC && tm.beta < 0.5)
      throw Error(ErrorKind::InvalidParameter, "PC quadrature requires beta >= 1/2", tm.beta);
  }
  if (terms.empty()) return Eigen::VectorXd::Zero(n);

  // terms sharing a shifted system: equal t for CF/PC, everything for DTI
  std::vector<std::vector<int>> groups;
  if (rule.scheme == Scheme::DTI) {
    groups.emplace_back();
    for (size_t i = 0; i < terms.size(); ++i) groups[0].push_back(static_cast<int>(i));
  } else {
    std::map<double, int> by_t;
    for (size_t i = 0; i < terms.size(); ++i) {
      auto [it, fresh] = by_t.emplace(terms[i].t, static_cast<int>(groups.size()));
      if (fresh) groups.emplace_back();
      groups[it->second].push_back(static_cast<int>(i));
    }
  }
  std::vector<Eigen::VectorXd> Mv(terms.size());
  for (size_t i = 0; i < terms.size(); ++i) Mv[i] = pencil.mass_apply(terms[i].v);

  std::vector<Task> tasks;
  for (int g = 0; g < static_cast<int>(groups.size()); ++g)
    for (int k = 0; k < static_cast<int>(rule.nodes.size()); ++k) {
      tasks.push_back({g, k, false});
      if (opts.expand_conjugates && rule.nodes[k].imag() != 0.0) tasks.push_back({g, k, true});
    }
  const int nt = static_cast<int>(tasks.size());
  std::vector<Eigen::VectorXcd> parts(nt);

  auto run = [&](int ti) {
    const Task& task = tasks[ti];
    const bool halve = opts.expand_conjugates && rule.nodes[task.node].imag() != 0.0;
    const cplx z = task.conjugate ? std::conj(rule.nodes[task.node]) : rule.nodes[task.node];
    cplx w = halve ? 0.5 * rule.weights[task.node] : rule.weights[task.node];
    if (task.conjugate) w = std::conj(w);
    const double t = terms[groups[task.group][0]].t;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (int i : groups[task.group]) rhs += (w * node_factor(rule, gamma, K, terms[i], z)) * Mv[i].cast<cplx>();
    Eigen::MatrixXcd X;
    try {
      X = rule.scheme == Scheme::DTI ? pencil.solve(z, -1.0, rhs)
                                     : pencil.solve(std::pow(z, gamma), K * std::pow(t, gamma), rhs);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " at contour node", task.node);
    }
    parts[ti] = X.col(0);
  };

  if (opts.exec == Exec::Serial) {
    for (int ti = 0; ti < nt; ++ti) run(ti);
  } else {
    int failed = -1;
    ErrorKind kind = ErrorKind::AccuracyFailure;
    std::string msg;
#pragma omp parallel for schedule(dynamic, 1)
    for (int ti = 0; ti < nt; ++ti) {
      try {
        run(ti);
      } catch (const Error& e) {
#pragma omp critical
        if (failed < 0 || ti < failed) {
          failed = ti;
          kind = e.kind();
          msg = e.what();
        }
      }
    }
    if (failed >= 0) throw Error(kind, msg, tasks[failed].node);
  }

  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(n);
  for (int ti = 0; ti < nt; ++ti) sum += parts[ti];
  if (opts.imag_residue) {
    const double re = sum.real().norm();
    *opts.imag_residue = re > 0.0 ? sum.imag().norm() / re : sum.imag().norm();
  }
  return sum.real();
}

Eigen::VectorXd ml_apply(const ContourRule& rule, double gamma, double beta, double t, double K,
                         const Pencil& pencil, const Eigen::VectorXd& v, const MlOptions& opts) {
  return ml_apply(rule, gamma, K, pencil, {MlTerm{beta, t, v}}, opts);
}

}  // namespace tfde
