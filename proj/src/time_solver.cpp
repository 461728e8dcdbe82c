#include "tfde/time_solver.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

#include "tfde/error.hpp"

namespace tfde {

void validate(const TimeModelSpec& spec) {
  if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) throw Error(ErrorKind::InvalidParameter, "gamma must lie in (0,1)", spec.gamma);
  if (!(spec.lambda >= 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be nonnegative", spec.lambda);
  if (!(spec.K > 0.0)) throw Error(ErrorKind::InvalidParameter, "K must be positive", spec.K);
  if (!(spec.T > 0.0)) throw Error(ErrorKind::InvalidParameter, "T must be positive", spec.T);
  switch (spec.op) {
    case SpaceOperator::Laplacian: break;
    case SpaceOperator::TemperedFractional:
      if (!(spec.alpha > 1.0 && spec.alpha <= 2.0))
        throw Error(ErrorKind::InvalidParameter, "tempered operator order must lie in (1,2]", spec.alpha);
      if (!(spec.space_lambda >= 0.0)) throw Error(ErrorKind::InvalidParameter, "space tempering must be nonnegative");
      break;
    case SpaceOperator::FractionalLaplacian:
      if (!(spec.alpha > 0.0 && spec.alpha <= 2.0))
        throw Error(ErrorKind::InvalidParameter, "fractional Laplacian order must lie in (0,2]", spec.alpha);
      break;
  }
}

Eigen::VectorXd SpaceDiscretization::mass_solve(const Eigen::VectorXd& F) const {
  if (F.size() != dofs()) throw Error(ErrorKind::DimensionMismatch, "load size mismatch");
  return mass_ldlt_->solve(F);
}

Eigen::VectorXd SpaceDiscretization::project(const RealFn& g) const {
  RhsDescription f;
  f.regular = g;
  return mass_solve(assemble_load(f, mesh, kind));
}

double SpaceDiscretization::h1_seminorm(const Eigen::VectorXd& U) const {
  return std::sqrt(std::max(0.0, U.dot(laplacian * U)));
}

SpaceDiscretization discretize(const TimeModelSpec& spec, const UniformMesh& mesh, BasisKind kind, bool iterative) {
  validate(spec);
  SpaceDiscretization sd;
  sd.mesh = mesh;
  sd.kind = kind;
  sd.op = spec.op;
  sd.mass = weighted_mass(mesh, kind, Coefficient::constant_value(1.0));
  sd.laplacian = laplacian_stiffness(mesh, kind);
  auto ldlt = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(sd.mass);
  if (ldlt->info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "mass matrix factorization failed");
  sd.mass_ldlt_ = ldlt;
  switch (spec.op) {
    case SpaceOperator::Laplacian:
      sd.pencil = std::make_shared<SparsePencil>(sd.mass, sd.laplacian);
      break;
    case SpaceOperator::FractionalLaplacian:
      sd.power = spec.alpha / 2.0;
      sd.pencil = std::make_shared<SparsePencil>(sd.mass, sd.laplacian);
      break;
    case SpaceOperator::TemperedFractional: {
      SpaceModelSpec ms;
      ms.alpha = spec.alpha;
      ms.lambda = spec.space_lambda;
      ms.p = 0.0;
      ms.f.regular = [](double) { return 0.0; };
      auto sys = std::make_shared<AssembledSystem>(assemble_galerkin(ms, mesh, kind));
      if (iterative) {
        LinearMap<cplx> S = [sys](const Eigen::VectorXcd& x) { return sys->apply<cplx>(x); };
        sd.pencil = std::make_shared<GmresPencil>(sd.mass, S);
      } else {
        sd.pencil = std::make_shared<DensePencil>(Eigen::MatrixXd(sd.mass), sys->dense());
      }
      break;
    }
  }
  return sd;
}

Eigen::VectorXd MlContext::apply(const std::vector<MlTerm>& terms) const {
  if (rule.scheme == Scheme::DTI) return ml_apply(rule, gamma, K, *pencil, terms, opts);
  std::vector<MlTerm> low;
  std::map<double, std::vector<MlTerm>> high;
  for (const auto& term : terms) (term.beta > 4.0 ? high[term.beta] : low).push_back(term);
  Eigen::VectorXd out = ml_apply(rule, gamma, K, *pencil, low, opts);
  const int n1 = rule.scheme == Scheme::PC ? rule.n1 : 16;
  for (const auto& [beta, group] : high) out += ml_apply(pc_nodes(gamma, beta, n1), gamma, K, *pencil, group, opts);
  return out;
}

MlContext make_context(const TimeModelSpec& spec, const SpaceDiscretization& space, Scheme scheme, int n1,
                       MlOptions opts) {
  validate(spec);
  MlContext ctx;
  ctx.gamma = spec.gamma;
  ctx.K = spec.K;
  ctx.pencil = space.pencil;
  ctx.opts = opts;
  if (space.power != 1.0 && scheme != Scheme::DTI)
    throw Error(ErrorKind::InvalidModel, "a fractional power of the operator needs the DTI scheme");
  switch (scheme) {
    case Scheme::CF: ctx.rule = cf_nodes(n1 > 0 ? n1 : 16); break;
    case Scheme::PC: ctx.rule = pc_nodes(spec.gamma, 1.0, n1 > 0 ? n1 : 16); break;
    case Scheme::DTI: {
      const auto [lo, hi] = spectral_bounds(*space.pencil);
      ctx.rule = dti_nodes(lo, hi, space.power);
      break;
    }
  }
  if (spec.gamma > 0.5 && !space.pencil->symmetric() && scheme != Scheme::DTI)
    ctx.diagnostics.push_back("gamma > 1/2 with a non-symmetric operator: sector condition not verified");
  return ctx;
}

Eigen::VectorXd solve_homogeneous(const MlContext& ctx, const SpaceDiscretization& space, double lambda, double t,
                                  const Eigen::VectorXd& g_h, bool check_stability) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "solve time must be positive", t);
  const Eigen::VectorXd U = std::exp(-lambda * t) * ctx.apply({MlTerm{1.0, t, g_h}});
  if (check_stability && space.op != SpaceOperator::TemperedFractional) {
    const double before = space.h1_seminorm(g_h), after = space.h1_seminorm(U);
    if (after > before * (1.0 + 1e-8) + 1e-300)
      throw Error(ErrorKind::StabilityViolation, "H1 seminorm grew during the homogeneous solve", after / before);
  }
  return U;
}

Eigen::VectorXd source_power_ml(const MlContext& ctx, double t, const std::vector<PowerTerm>& terms) {
  std::vector<MlTerm> ml;
  for (const auto& p : terms) {
    if (!(p.nu > 0.0)) throw Error(ErrorKind::InvalidParameter, "power-series exponents need nu > 0", p.nu);
    ml.push_back({ctx.gamma + p.nu, t, std::tgamma(p.nu) * p.v});
  }
  return ctx.apply(ml);
}

// ---------------------------------------------------------------- piecewise

PiecewisePoly piecewise_quadratic(const VectorFn& q, const std::vector<double>& breaks) {
  if (breaks.size() < 2) throw Error(ErrorKind::InvalidInput, "need at least one interval");
  PiecewisePoly rep;
  rep.breaks = breaks;
  Eigen::VectorXd f0 = q(breaks[0]);
  for (size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1], h = b - a;
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "breakpoints must increase", static_cast<double>(k));
    const Eigen::VectorXd fm = q(0.5 * (a + b)), f1 = q(b);
    const Eigen::VectorXd c2 = 2.0 * (f1 - 2.0 * fm + f0) / (h * h);
    rep.left.push_back({f0, (4.0 * fm - 3.0 * f0 - f1) / h, c2});
    rep.right.push_back({f1, (f0 - 4.0 * fm + 3.0 * f1) / h, c2});
    f0 = f1;
  }
  return rep;
}

namespace {

Eigen::VectorXd eval_poly(const std::vector<Eigen::VectorXd>& c, double x) {
  Eigen::VectorXd v = c.back();
  for (int l = static_cast<int>(c.size()) - 2; l >= 0; --l) v = v * x + c[l];
  return v;
}

void check_piecewise(const PiecewisePoly& rep, double t) {
  const size_t M = rep.breaks.size() - 1;
  if (rep.breaks.size() < 2 || rep.left.size() != M || rep.right.size() != M)
    throw Error(ErrorKind::InvalidInput, "piecewise coefficient sets do not match the breakpoints");
  if (std::abs(rep.breaks.front()) > 0.0 || std::abs(rep.breaks.back() - t) > 1e-12 * t)
    throw Error(ErrorKind::InvalidInput, "breakpoints must run from 0 to t");
  for (size_t k = 0; k < M; ++k) {
    const double a = rep.breaks[k], b = rep.breaks[k + 1];
    if (!(b > a)) throw Error(ErrorKind::InvalidInput, "breakpoints must increase", static_cast<double>(k));
    if (rep.left[k].empty() || rep.right[k].empty() || rep.left[k].size() > 4 || rep.right[k].size() > 4)
      throw Error(ErrorKind::InvalidInput, "interval degree must lie in [0,3]", static_cast<double>(k));
    for (double x : {a, 0.5 * (a + b), b}) {
      const Eigen::VectorXd l = eval_poly(rep.left[k], x - a), r = eval_poly(rep.right[k], x - b);
      if ((l - r).norm() > 1e-9 * (1.0 + l.norm()))
        throw Error(ErrorKind::InvalidInput, "left and right coefficients describe different polynomials",
                    static_cast<double>(k));
    }
  }
}

}  // namespace

Eigen::VectorXd source_piecewise(const MlContext& ctx, double t, const PiecewisePoly& rep) {
  check_piecewise(rep, t);
  const int M = static_cast<int>(rep.breaks.size()) - 1;
  std::vector<MlTerm> ml;
  for (int k = 0; k < M; ++k) {
    const size_t deg = std::max(rep.left[k].size(), k > 0 ? rep.right[k - 1].size() : size_t{0});
    for (size_t l = 0; l < deg; ++l) {
      Eigen::VectorXd d = l < rep.left[k].size() ? rep.left[k][l] : Eigen::VectorXd::Zero(rep.left[k][0].size());
      if (k > 0 && l < rep.right[k - 1].size()) d -= rep.right[k - 1][l];
      ml.push_back({ctx.gamma + l + 1.0, t - rep.breaks[k], std::tgamma(l + 1.0) * d});
    }
  }
  return ctx.apply(ml);
}

// ---------------------------------------------------------------- Chebyshev

std::vector<double> chebyshev_points(double t, int degree) {
  std::vector<double> s(degree + 1);
  for (int j = 0; j <= degree; ++j)
    s[j] = 0.5 * t * (1.0 + std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * (degree + 1))));
  return s;
}

ChebyshevSource chebyshev_interpolant(const VectorFn& q, double t, int degree) {
  if (degree < 0) throw Error(ErrorKind::InvalidParameter, "Chebyshev degree must be nonnegative");
  if (degree > 20) throw Error(ErrorKind::ConditioningFailure, "monomial conversion is ill-conditioned above degree 20", degree);
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "interpolation interval must be nonempty");
  using ld = long double;
  const int n = degree + 1;
  const ld pi = std::numbers::pi_v<ld>;
  // T_m(2u - 1) in monomials of u = s/t; integer coefficients, exact in long double up to degree 20
  std::vector<std::vector<ld>> Ts(n, std::vector<ld>(n, 0.0L));
  Ts[0][0] = 1.0L;
  if (n > 1) Ts[1][0] = -1.0L, Ts[1][1] = 2.0L;
  for (int m = 2; m < n; ++m)
    for (int i = 0; i < n; ++i)
      Ts[m][i] = (i > 0 ? 4.0L * Ts[m - 1][i - 1] : 0.0L) - 2.0L * Ts[m - 1][i] - Ts[m - 2][i];
  const auto s = chebyshev_points(t, degree);
  std::vector<Eigen::VectorXd> vals;
  for (double sj : s) vals.push_back(q(sj));
  const int dim = static_cast<int>(vals[0].size());
  ChebyshevSource rep;
  rep.t = t;
  rep.degree = degree;
  rep.coef.assign(n, Eigen::VectorXd::Zero(dim));
  std::vector<ld> a(n), c(n);
  for (int d = 0; d < dim; ++d) {
    // Chebyshev coefficients from the node values
    for (int m = 0; m < n; ++m) {
      ld acc = 0.0L;
      for (int j = 0; j < n; ++j) acc += static_cast<ld>(vals[j](d)) * std::cos(m * (2.0L * j + 1.0L) * pi / (2.0L * n));
      a[m] = (m == 0 ? 1.0L : 2.0L) * acc / n;
    }
    ld scale = 1.0L;
    for (int i = 0; i < n; ++i) {
      ld acc = 0.0L;
      for (int m = i; m < n; ++m) acc += a[m] * Ts[m][i];
      c[i] = acc * scale;
      scale /= t;
    }
    for (int i = 0; i < n; ++i) rep.coef[i](d) = static_cast<double>(c[i]);
  }
  return rep;
}

Eigen::VectorXd source_chebyshev(const MlContext& ctx, const ChebyshevSource& rep) {
  if (rep.degree > 20) throw Error(ErrorKind::ConditioningFailure, "monomial conversion is ill-conditioned above degree 20", rep.degree);
  if (static_cast<int>(rep.coef.size()) != rep.degree + 1) throw Error(ErrorKind::InvalidInput, "coefficient count mismatch");
  std::vector<MlTerm> terms;
  for (int j = 0; j <= rep.degree; ++j) terms.push_back({ctx.gamma + j + 1.0, rep.t, std::tgamma(j + 1.0) * rep.coef[j]});
  return ctx.apply(terms);
}

// ---------------------------------------------------------------- L1

void l1_history(const Eigen::MatrixXd& H, int cols, const std::vector<double>& b, Eigen::VectorXd& y, Exec exec) {
  const int n = static_cast<int>(H.cols());
  y.setZero(n);
  if (cols <= 0) return;
  // reversed weights so each dof is one contiguous dot product
  std::vector<double> w(cols);
  for (int j = 0; j < cols; ++j) w[j] = b[cols - j];
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), cols);
  if (exec == Exec::Serial) {
    for (int i = 0; i < n; ++i) y(i) = H.col(i).head(cols).dot(wv);
  } else {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) y(i) = H.col(i).head(cols).dot(wv);
  }
}

L1Result l1_baseline(const TimeModelSpec& spec, const SpaceDiscretization& space, const Eigen::VectorXd& g_h,
                     const VectorFn& load, int steps, Exec exec) {
  validate(spec);
  if (space.op != SpaceOperator::Laplacian) throw Error(ErrorKind::InvalidModel, "the L1 baseline supports the Laplacian only");
  if (steps < 1) throw Error(ErrorKind::InvalidParameter, "L1 needs at least one step", steps);
  const auto t0 = std::chrono::steady_clock::now();
  const int n = space.dofs();
  const double tau = spec.T / steps, g = spec.gamma;
  const double c0 = std::pow(tau, -g) / std::tgamma(2.0 - g);
  std::vector<double> b(steps + 1);
  for (int l = 0; l <= steps; ++l) b[l] = std::pow(l + 1.0, 1.0 - g) - std::pow(static_cast<double>(l), 1.0 - g);

  Eigen::SparseMatrix<double> A = c0 * space.mass + spec.K * space.laplacian;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "L1 step matrix factorization failed");

  Eigen::MatrixXd H(steps, n);  // row j: V_{j+1} - V_j
  Eigen::VectorXd V = g_h, y(n);
  for (int k = 1; k <= steps; ++k) {
    const double tk = k * tau;
    l1_history(H, k - 1, b, y, exec);
    const Eigen::VectorXd rhs = load(tk) + c0 * (space.mass * (V - y));
    const Eigen::VectorXd Vn = solver.solve(rhs);
    H.row(k - 1) = (Vn - V).transpose();
    V = Vn;
  }
  L1Result res;
  res.U = std::exp(-spec.lambda * spec.T) * V;
  res.steps = steps;
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace tfde
