#include "tfde/fem_space.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <numbers>

#include "tfde/error.hpp"
#include "tfde/quadrature.hpp"

namespace tfde {

UniformMesh::UniformMesh(Interval I, int levels) : interval(I), J(levels) {
  if (!(I.a < I.b)) throw Error(ErrorKind::InvalidParameter, "mesh interval needs a < b");
  if (levels < 1 || levels > 24) throw Error(ErrorKind::InvalidParameter, "mesh levels out of range", levels);
  N = 1 << levels;
  h = I.length() / N;
}

int BasisFamily::dofs(const UniformMesh& mesh) const {
  return kind == BasisKind::Linear ? mesh.N - 1 : 2 * mesh.N - 1;
}

std::vector<MotherFunction> BasisFamily::mothers() const {
  if (kind == BasisKind::Linear) return {linear_hat()};
  return {quadratic_node(), quadratic_bubble()};
}

std::vector<int> BasisFamily::family_sizes(const UniformMesh& mesh) const {
  if (kind == BasisKind::Linear) return {mesh.N - 1};
  return {mesh.N - 1, mesh.N};
}

LocalShape local_shape(const UniformMesh& mesh, BasisKind kind, int el) {
  LocalShape s;
  const double sc = 1.0 / std::sqrt(mesh.h);
  auto add = [&](int dof, std::array<double, 3> c) {
    for (auto& v : c) v *= sc;
    s.dof[s.count] = dof;
    s.poly[s.count] = c;
    ++s.count;
  };
  if (kind == BasisKind::Linear) {
    if (el >= 1) add(el - 1, {1.0, -1.0, 0.0});
    if (el <= mesh.N - 2) add(el, {0.0, 1.0, 0.0});
  } else {
    if (el >= 1) add(el - 1, {1.0, -3.0, 2.0});
    add(mesh.N - 1 + el, {0.0, 4.0, -4.0});
    if (el <= mesh.N - 2) add(el, {0.0, -1.0, 2.0});
  }
  return s;
}

Coefficient Coefficient::constant_value(double v) {
  Coefficient c;
  c.constant = true;
  c.value = v;
  return c;
}

Coefficient Coefficient::function(RealFn f, RealFn df) {
  Coefficient c;
  c.constant = false;
  c.f = std::move(f);
  c.df = std::move(df);
  return c;
}

double Coefficient::derivative(double x) const {
  if (constant) return 0.0;
  if (df) return df(x);
  const double e = 1e-4;
  return (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * e);
}

double RhsDescription::operator()(double x, Interval I) const {
  double v = regular ? regular(x) : 0.0;
  for (const auto& s : singular) {
    const double dist = s.at_right ? I.b - x : x - I.a;
    v += s.smooth(x) * std::pow(dist, s.exponent);
  }
  return v;
}

namespace {

inline double pval(const std::array<double, 3>& c, double t) { return c[0] + t * (c[1] + t * c[2]); }
inline double dval(const std::array<double, 3>& c, double t) { return c[1] + 2.0 * c[2] * t; }

constexpr int kElementPoints = 8;

// sum over elements of w(x) * a(phi_j) * b(phi_i); deriv_trial selects phi_j'
Eigen::SparseMatrix<double> element_matrix(const UniformMesh& mesh, BasisKind kind, const Coefficient& w,
                                           bool deriv_trial, bool deriv_test) {
  const int n = BasisFamily{kind}.dofs(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  const Rule& g = gauss_legendre(kElementPoints);
  for (int el = 0; el < mesh.N; ++el) {
    const LocalShape s = local_shape(mesh, kind, el);
    for (int k = 0; k < g.size(); ++k) {
      const double t = 0.5 * (1.0 + g.x[k]);
      const double x = mesh.node(el) + t * mesh.h;
      const double wk = 0.5 * g.w[k] * mesh.h * w(x);
      for (int a = 0; a < s.count; ++a) {
        const double vi = deriv_test ? dval(s.poly[a], t) / mesh.h : pval(s.poly[a], t);
        for (int b = 0; b < s.count; ++b) {
          const double vj = deriv_trial ? dval(s.poly[b], t) / mesh.h : pval(s.poly[b], t);
          trip.emplace_back(s.dof[a], s.dof[b], wk * vi * vj);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(0.0);
  return m;
}

void check_singular_terms(const RhsDescription& f) {
  for (const auto& s : f.singular)
    if (!(s.exponent > -1.0))
      throw Error(ErrorKind::InvalidInput, "non-integrable endpoint singularity", s.exponent);
}

}  // namespace

Eigen::SparseMatrix<double> weighted_mass(const UniformMesh& mesh, BasisKind kind, const Coefficient& w) {
  return element_matrix(mesh, kind, w, false, false);
}

Eigen::SparseMatrix<double> weighted_convection(const UniformMesh& mesh, BasisKind kind, const Coefficient& w) {
  return element_matrix(mesh, kind, w, true, false);
}

Eigen::SparseMatrix<double> laplacian_stiffness(const UniformMesh& mesh, BasisKind kind) {
  return element_matrix(mesh, kind, Coefficient::constant_value(1.0), true, true);
}

Eigen::VectorXd assemble_load(const RhsDescription& f, const UniformMesh& mesh, BasisKind kind,
                              double weight_rate) {
  check_singular_terms(f);
  const int n = BasisFamily{kind}.dofs(mesh);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  const Interval I = mesh.interval;
  const Rule& g = gauss_legendre(12);
  for (int el = 0; el < mesh.N; ++el) {
    const LocalShape s = local_shape(mesh, kind, el);
    const double x0 = mesh.node(el);
    auto accumulate = [&](double x, double wv) {
      const double t = (x - x0) / mesh.h;
      const double ew = wv * std::exp(weight_rate * x);
      for (int a = 0; a < s.count; ++a) F(s.dof[a]) += ew * pval(s.poly[a], t);
    };
    const bool first = el == 0, last = el == mesh.N - 1;
    // terms whose singularity sits on this element get a Jacobi rule
    std::vector<const SingularTerm*> special;
    for (const auto& st : f.singular)
      if ((st.at_right && last) || (!st.at_right && first)) special.push_back(&st);
    for (int k = 0; k < g.size(); ++k) {
      const double x = x0 + 0.5 * (1.0 + g.x[k]) * mesh.h;
      double v = f.regular ? f.regular(x) : 0.0;
      for (const auto& st : f.singular) {
        if ((st.at_right && last) || (!st.at_right && first)) continue;
        v += st.smooth(x) * std::pow(st.at_right ? I.b - x : x - I.a, st.exponent);
      }
      accumulate(x, 0.5 * g.w[k] * mesh.h * v);
    }
    for (const SingularTerm* st : special) {
      const Rule r = st->at_right ? jacobi_right_on(20, st->exponent, x0, x0 + mesh.h)
                                  : jacobi_left_on(20, st->exponent, x0, x0 + mesh.h);
      for (int k = 0; k < r.size(); ++k) accumulate(r.x[k], r.w[k] * st->smooth(r.x[k]));
    }
  }
  return F;
}

Eigen::VectorXd l2_projection(const RealFn& g, const UniformMesh& mesh, BasisKind kind) {
  RhsDescription f;
  f.regular = g;
  const Eigen::VectorXd b = assemble_load(f, mesh, kind);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(weighted_mass(mesh, kind, Coefficient::constant_value(1.0)));
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "mass matrix factorization failed");
  return ldlt.solve(b);
}

namespace {

void check_coercivity(const SpaceModelSpec& spec, Interval I) {
  for (int k = 0; k <= 200; ++k) {
    const double x = I.a + I.length() * k / 200.0;
    const double v = spec.c(x) - 0.5 * spec.m.derivative(x);
    if (v < -1e-14) throw Error(ErrorKind::InvalidModel, "c - m'/2 is negative at a sample point", x);
  }
}

void check_space_params(const SpaceModelSpec& spec) {
  if (!(spec.alpha > 1.0 && spec.alpha <= 2.0)) throw Error(ErrorKind::InvalidParameter, "alpha must lie in (1,2]");
  if (!(spec.lambda >= 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be nonnegative");
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw Error(ErrorKind::InvalidParameter, "p must lie in [0,1]");
}

Eigen::SparseMatrix<double> operator_sum(std::initializer_list<std::pair<double, Eigen::SparseMatrix<double>>> terms) {
  Eigen::SparseMatrix<double> out;
  bool first = true;
  for (const auto& [s, m] : terms) {
    if (first) {
      out = s * m;
      first = false;
    } else {
      out += s * m;
    }
  }
  out.prune(0.0);
  return out;
}

}  // namespace

AssembledSystem assemble_galerkin(const SpaceModelSpec& spec, const UniformMesh& mesh, BasisKind kind, Exec exec) {
  check_space_params(spec);
  check_coercivity(spec, mesh.interval);
  AssembledSystem sys;
  sys.mesh = mesh;
  sys.kind = kind;
  sys.formulation = Formulation::Galerkin;
  sys.alpha = spec.alpha;
  sys.lambda = spec.lambda;
  sys.p = spec.p;
  sys.translation_invariant = spec.m.is_zero() && spec.c.constant;
  const double a = spec.alpha, l = spec.lambda;
  const auto L = assemble_fractional_toeplitz(mesh, kind, a, l, Side::Left, exec);
  sys.fractional = linear_combination(-(1.0 - spec.p), L, -spec.p, L.transposed());
  const auto one = Coefficient::constant_value(1.0);
  const double lam_a = std::pow(l, a);
  const double lam_a1 = l > 0.0 ? std::pow(l, a - 1.0) : 0.0;
  sys.banded = operator_sum({{lam_a, weighted_mass(mesh, kind, one)},
                             {a * (1.0 - 2.0 * spec.p) * lam_a1, weighted_convection(mesh, kind, one)},
                             {1.0, weighted_convection(mesh, kind, spec.m)},
                             {1.0, weighted_mass(mesh, kind, spec.c)}});
  sys.load = assemble_load(spec.f, mesh, kind);
  return sys;
}

AssembledSystem assemble_petrov_galerkin(const SpaceModelSpec& spec, const UniformMesh& mesh, BasisKind kind,
                                         Exec exec) {
  check_space_params(spec);
  if (spec.p != 0.0 && spec.p != 1.0)
    throw Error(ErrorKind::InvalidModel, "the one-sided Petrov-Galerkin path needs p = 0 or p = 1", spec.p);
  check_coercivity(spec, mesh.interval);
  AssembledSystem sys;
  sys.mesh = mesh;
  sys.kind = kind;
  sys.formulation = Formulation::PetrovGalerkin;
  sys.alpha = spec.alpha;
  sys.lambda = spec.lambda;
  sys.p = spec.p;
  sys.translation_invariant = spec.m.is_zero() && spec.c.constant;
  const double a = spec.alpha, l = spec.lambda;
  const double bound = std::abs(std::cos(std::numbers::pi * a / 2.0)) * std::pow(std::tgamma(a / 2.0 + 1.0), 2) /
                       (2.0 * std::numbers::pi * (a - 1.0) * std::pow(mesh.interval.length(), a));
  const double lam_a = std::pow(l, a);
  if (lam_a >= bound)
    sys.warnings.push_back("lambda^alpha = " + std::to_string(lam_a) + " is not below the uniqueness bound " +
                           std::to_string(bound));
  // right operator when p = 1, left operator when p = 0
  const double sgn = spec.p == 1.0 ? 1.0 : -1.0;
  const auto L0 = assemble_fractional_toeplitz(mesh, kind, a, 0.0, spec.p == 1.0 ? Side::Right : Side::Left, exec);
  sys.fractional = linear_combination(-1.0, L0, 0.0, L0);
  const auto one = Coefficient::constant_value(1.0);
  const double lam_a1 = l > 0.0 ? std::pow(l, a - 1.0) : 0.0;
  sys.banded = operator_sum({{-sgn * a * lam_a1, weighted_convection(mesh, kind, one)},
                             {(1.0 - a) * lam_a, weighted_mass(mesh, kind, one)},
                             {1.0, weighted_convection(mesh, kind, spec.m)},
                             {sgn * l, weighted_mass(mesh, kind, spec.m)},
                             {1.0, weighted_mass(mesh, kind, spec.c)}});
  sys.load = assemble_load(spec.f, mesh, kind, -sgn * l);
  sys.recover_rate = sgn * l;
  return sys;
}

AssembledSystem assemble_advection_diffusion(double alpha1, double alpha2, double d, double lambda,
                                             const RhsDescription& f, const UniformMesh& mesh, BasisKind kind) {
  if (!(alpha1 > 1.0 && alpha1 <= 2.0)) throw Error(ErrorKind::InvalidParameter, "alpha1 must lie in (1,2]");
  if (!(alpha2 > 0.0 && alpha2 <= 1.0)) throw Error(ErrorKind::InvalidParameter, "alpha2 must lie in (0,1]");
  const double bound = -std::abs(std::cos(alpha1 / 2.0)) * std::pow(std::tgamma((alpha1 - alpha2) / 2.0 + 1.0), 2) /
                       (2.0 * std::numbers::pi * std::pow(mesh.interval.length(), alpha1 - alpha2));
  AssembledSystem sys;
  sys.mesh = mesh;
  sys.kind = kind;
  sys.formulation = Formulation::AdvectionDiffusion;
  sys.alpha = alpha1;
  sys.lambda = lambda;
  sys.translation_invariant = true;
  if (!(d > bound)) sys.warnings.push_back("advection weight below the uniqueness bound");
  const auto L1 = assemble_fractional_toeplitz(mesh, kind, alpha1, 0.0, Side::Left);
  const auto L2 = assemble_fractional_toeplitz(mesh, kind, alpha2, 0.0, Side::Left);
  sys.fractional = linear_combination(-1.0, L1, d, L2);
  const int n = BasisFamily{kind}.dofs(mesh);
  sys.banded = Eigen::SparseMatrix<double>(n, n);
  sys.load = assemble_load(f, mesh, kind, lambda);
  sys.recover_rate = -lambda;
  return sys;
}

Eigen::MatrixXd AssembledSystem::dense() const {
  Eigen::MatrixXd d = fractional.dense();
  d += Eigen::MatrixXd(banded);
  return d;
}

double evaluate_fe(const UniformMesh& mesh, BasisKind kind, const Eigen::VectorXd& U, double x) {
  const double y = (x - mesh.interval.a) / mesh.h;
  int el = static_cast<int>(std::floor(y));
  el = std::clamp(el, 0, mesh.N - 1);
  const double t = y - el;
  const LocalShape s = local_shape(mesh, kind, el);
  double v = 0.0;
  for (int a = 0; a < s.count; ++a) v += U(s.dof[a]) * pval(s.poly[a], t);
  return v;
}

double AssembledSystem::evaluate(const Eigen::VectorXd& U, double x) const {
  return std::exp(recover_rate * x) * evaluate_fe(mesh, kind, U, x);
}

double l2_error(const UniformMesh& mesh, BasisKind kind, const Eigen::VectorXd& U, const RealFn& exact,
                double recover_rate) {
  const Rule& g = gauss_legendre(10);
  double acc = 0.0;
  for (int el = 0; el < mesh.N; ++el) {
    const LocalShape s = local_shape(mesh, kind, el);
    for (int k = 0; k < g.size(); ++k) {
      const double t = 0.5 * (1.0 + g.x[k]);
      const double x = mesh.node(el) + t * mesh.h;
      double uh = 0.0;
      for (int a = 0; a < s.count; ++a) uh += U(s.dof[a]) * pval(s.poly[a], t);
      const double e = exact(x) - std::exp(recover_rate * x) * uh;
      acc += 0.5 * g.w[k] * mesh.h * e * e;
    }
  }
  return std::sqrt(acc);
}

double energy_error(const UniformMesh& mesh, double alpha, const RealFn& approx, const RealFn& exact,
                    int refine_factor) {
  int extra = 0;
  while ((1 << extra) < refine_factor) ++extra;
  if ((1 << extra) != refine_factor) throw Error(ErrorKind::InvalidParameter, "refinement factor must be a power of two");
  const UniformMesh fine(mesh.interval, mesh.J + extra);
  const auto L0 = assemble_fractional_toeplitz(fine, BasisKind::Linear, alpha, 0.0, Side::Left);
  Eigen::VectorXd e(fine.N - 1);
  const double sh = std::sqrt(fine.h);
  for (int i = 1; i < fine.N; ++i) {
    const double x = fine.node(i);
    e(i - 1) = sh * (exact(x) - approx(x));
  }
  const double q = -e.dot(L0.apply<double>(e));
  return std::sqrt(std::max(q, 0.0));
}

ErrorNorms error_norms(const AssembledSystem& sys, const Eigen::VectorXd& U, const RealFn& exact,
                       int refine_factor) {
  ErrorNorms out;
  out.l2 = l2_error(sys.mesh, sys.kind, U, exact, sys.recover_rate);
  out.energy = energy_error(sys.mesh, sys.alpha, [&](double x) { return sys.evaluate(U, x); }, exact, refine_factor);
  return out;
}

Example1Manufactured manufactured_rhs_example1(double alpha, double lambda, double beta, double q) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw Error(ErrorKind::InvalidParameter, "alpha must lie in (1,2)");
  if (!(beta > alpha / 2.0)) throw Error(ErrorKind::InvalidParameter, "beta must exceed alpha/2");
  if (!(lambda >= 0.0 && q >= 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda and q must be nonnegative");
  Example1Manufactured ex;
  const double la1 = lambda > 0.0 ? std::pow(lambda, alpha - 1.0) : 0.0;
  const double la = std::pow(lambda, alpha);
  const double mq = q * la1;
  ex.m = mq == 0.0 ? Coefficient::zero()
                   : Coefficient::function([mq](double x) { return mq * (1.0 - x); }, [mq](double) { return -mq; });
  ex.exact.u = [=](double x) { return std::pow(1.0 - x, beta) - std::exp(lambda * x) * (1.0 - x); };
  ex.exact.du = [=](double x) {
    return -beta * std::pow(1.0 - x, beta - 1.0) - lambda * std::exp(lambda * x) * (1.0 - x) + std::exp(lambda * x);
  };
  const double g0 = std::tgamma(beta + 1.0) / std::tgamma(beta + 1.0 - alpha);
  // right blackboard derivative of (1-x)^beta, divided by (1-x)^{beta-alpha}
  auto series = [=](double x) {
    const double y = 1.0 - x;
    double term = g0, sum = g0;
    for (int n = 1; n <= 200; ++n) {
      term *= lambda * y / n * (beta + n) / (beta + n - alpha);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) return std::exp(lambda * (x - 1.0)) * sum;
    }
    if (lambda * y == 0.0) return std::exp(lambda * (x - 1.0)) * sum;
    throw Error(ErrorKind::AccuracyFailure, "manufactured series did not converge in 200 terms", x);
  };
  auto m = ex.m;
  ex.f.singular.push_back({[series](double x) { return -series(x); }, beta - alpha, true});
  const double r2 = 1.0 / std::tgamma(2.0 - alpha);
  ex.f.singular.push_back({[=](double x) { return r2 * std::exp(lambda * x); }, 1.0 - alpha, true});
  if (la != 0.0) ex.f.singular.push_back({[la](double) { return la; }, beta, true});
  ex.f.singular.push_back({[=](double x) { return -beta * (m(x) - alpha * la1); }, beta - 1.0, true});
  ex.f.regular = [=](double x) {
    const double e = std::exp(lambda * x);
    return -la * e * (1.0 - x) + (m(x) - alpha * la1) * (e - lambda * e * (1.0 - x));
  };
  return ex;
}

}  // namespace tfde
