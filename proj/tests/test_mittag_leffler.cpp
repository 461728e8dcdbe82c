#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>

#include "tfde/contour.hpp"
#include "tfde/error.hpp"
#include "tfde/fem_space.hpp"
#include "tfde/mittag_leffler.hpp"
#include "tfde/quadrature.hpp"
#include "ml_oracle.hpp"

using namespace tfde;
using namespace tfde::oracle;

namespace {

constexpr double kPi = std::numbers::pi;

bool throws_kind(const std::function<void()>& f, ErrorKind kind) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

// (M, S) of linear elements on (0,1) with 2^J cells
std::shared_ptr<SparsePencil> laplacian_pencil(int J) {
  const UniformMesh mesh({0.0, 1.0}, J);
  return std::make_shared<SparsePencil>(weighted_mass(mesh, BasisKind::Linear, Coefficient::constant_value(1.0)),
                                        laplacian_stiffness(mesh, BasisKind::Linear));
}

Eigen::VectorXd random_vector(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// NaN counts as a failure
void track(double& worst, double e) { worst = std::isfinite(e) ? std::max(worst, e) : INFINITY; }

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }


class FailingPencil : public Pencil {
 public:
  explicit FailingPencil(cplx bad) : bad_(bad) {}
  int size() const override { return 1; }
  Eigen::VectorXd mass_apply(const Eigen::VectorXd& v) const override { return v; }
  Eigen::VectorXd stiffness_apply(const Eigen::VectorXd& v) const override { return v; }
  Eigen::MatrixXcd solve(cplx a, cplx b, const Eigen::MatrixXcd& R) const override {
    if (std::abs(a - bad_) < 1e-12) throw Error(ErrorKind::SingularMatrix, "injected failure");
    return R / (a + b);
  }
  bool symmetric() const override { return true; }
  Eigen::MatrixXd dense_mass() const override { return Eigen::MatrixXd::Identity(1, 1); }
  Eigen::MatrixXd dense_stiffness() const override { return Eigen::MatrixXd::Identity(1, 1); }

 private:
  cplx bad_;
};

}  // namespace

TEST_CASE("scalar Mittag-Leffler matches the extended-precision table") {
  double worst = 0.0;
  for (const auto& r : kMlTable) {
    const cplx v = scalar_ml(r.g, r.b, cplx(r.zr, r.zi));
    const cplx ref(r.vr, r.vi);
    track(worst, std::abs(v - ref) / std::abs(ref));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("scalar Mittag-Leffler reductions") {
  CHECK(std::abs(scalar_ml(1.0, 1.0, 1.0) - std::exp(1.0)) <= 1e-15 * std::exp(1.0));
  CHECK(std::abs(scalar_ml(2.0, 1.0, -kPi * kPi) + 1.0) <= 1e-12);
  CHECK(std::abs(scalar_ml(0.6, 1.0, -1.0) - 0.4133273409431063005) <= 1e-12 * 0.4133273409431063005);
  CHECK(scalar_ml(0.5, 3.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  // E_{1,2}(z) = (e^z - 1)/z
  for (double z : {-30.0, -2.5, 0.5, 3.0})
    CHECK(std::abs(scalar_ml(1.0, 2.0, z) - std::expm1(z) / z) <= 1e-13 * std::abs(std::expm1(z) / z));
  CHECK(throws_kind([] { scalar_ml(0.0, 1.0, 1.0); }, ErrorKind::InvalidParameter));
  CHECK(throws_kind([] { scalar_ml(0.5, 1.0, std::nan("")); }, ErrorKind::InvalidInput));
}

TEST_CASE("convolution identity against adaptive quadrature") {
  const double g0 = 0.6, b0 = 0.6, nu0 = 2.0, q0 = 3.0, t0 = 1.0;
  const double rhs0 = std::tgamma(nu0) * std::pow(t0, b0 + nu0 - 1.0) * scalar_ml(g0, b0 + nu0, -q0 * std::pow(t0, g0));
  CHECK(std::abs(convolution_quadrature(g0, b0, nu0, q0, t0) - rhs0) <= 1e-9 * std::abs(rhs0));
  // gamma = 1, nu = 1: (1 - e^{-q t})/q = t E_{1,2}(-q t)
  CHECK(std::abs(ml_kernel(1.0, 2.0, 2.5, 1.3) - (-std::expm1(-2.5 * 1.3)) / 2.5) <= 1e-12);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ug(0.2, 0.95), ub(0.3, 3.0), un(0.3, 3.0), uq(0.0, 10.0), ut(0.1, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double g = ug(rng), b = ub(rng), nu = un(rng), q = uq(rng), t = ut(rng);
    const double lhs = convolution_quadrature(g, b, nu, q, t);
    const double rhs = std::tgamma(nu) * std::pow(t, b + nu - 1.0) * scalar_ml(g, b + nu, -q * std::pow(t, g));
    track(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("CF rational approximation of the exponential") {
  const auto r16 = cf_nodes(16);
  CHECK(r16.nodes.size() == 8);
  CHECK(cf_max_error(r16) <= 1e-10);
  // stored nodes are the upper half of a conjugate-closed set
  for (const auto& z : r16.nodes) CHECK(z.imag() > 0.0);
  double r0 = 0.0;
  for (size_t k = 0; k < r16.nodes.size(); ++k) r0 += (-0.5 * r16.weights[k] / (0.0 - r16.nodes[k])).real() * 2.0;
  CHECK(std::abs(r0 - 1.0) <= r16.predicted_error);
  // geometric convergence in the degree
  double prev = 1.0;
  for (int n = 8; n <= 14; n += 2) {
    const double e = cf_nodes(n).predicted_error;
    CHECK(e < prev / 20.0);
    prev = e;
  }
  CHECK(cf_nodes(8).predicted_error == doctest::Approx(1.923e-8).epsilon(0.01));
  try {
    cf_nodes(20);
    CHECK_MESSAGE(false, "degree 20 should be unresolved");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AccuracyFailure);
    CHECK(std::isfinite(e.detail()));
  }
  CHECK(throws_kind([] { cf_nodes(15); }, ErrorKind::InvalidParameter));
  CHECK(throws_kind([] { cf_nodes(6); }, ErrorKind::InvalidParameter));
  CHECK(throws_kind([] { cf_nodes(22); }, ErrorKind::InvalidParameter));
}

TEST_CASE("PC parameters and scalar stability") {
  const auto r = pc_nodes(0.6, 1.0, 16);
  CHECK(r.nodes.size() == 17);
  CHECK(r.sigma * r.tau < kPi);
  CHECK(r.tau <= 1.0);
  CHECK(r.tau == doctest::Approx(3.0 / 16.0).epsilon(1e-9));
  CHECK(r.predicted_error <= 1e-14);
  CHECK(r.nodes[0].imag() == 0.0);
  CHECK(throws_kind([] { pc_nodes(0.6, 0.4, 16); }, ErrorKind::InvalidParameter));
  DiagonalPencil one(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
  CHECK(throws_kind([&] { ml_apply(r, 0.6, 0.3, 1.0, 1.0, one, Eigen::VectorXd::Ones(1)); }, ErrorKind::InvalidParameter));
  for (double beta : {0.5, 1.0, 2.0, 4.0})
    for (double t : {0.1, 1.0, 5.0}) {
      const double v = ml_apply(r, 0.6, beta, t, 1.0, one, Eigen::VectorXd::Ones(1))(0);
      CHECK(std::abs(v - ml_kernel(0.6, beta, 1.0, t)) <= 1e-9 * std::abs(ml_kernel(0.6, beta, 1.0, t)));
      // amplification sum_k |w_k g_k| / |z_k^gamma + t^gamma|
      double amp = 0.0;
      for (size_t k = 0; k < r.nodes.size(); ++k)
        amp += std::abs(r.weights[k] * std::pow(r.nodes[k], 0.6 - beta)) / std::abs(std::pow(r.nodes[k], 0.6) + std::pow(t, 0.6));
      amp *= std::pow(t, beta - 1.0);
      CHECK(amp <= 10.0 * std::exp(r.sigma) * std::pow(r.sigma, 1.0 - beta) * std::pow(t, beta - 1.0));
    }
}

TEST_CASE("DTI contour encloses the spectrum and reproduces scalars") {
  const double smin = 2.0, smax = 3e4;
  for (double power : {1.0, 0.6}) {
    const auto r = dti_nodes(smin, smax, power);
    CHECK(r.n1 == 10 * static_cast<int>(std::ceil(std::log(smax / smin) + 3.0)));
    // every node in the open right half plane
    for (const auto& z : r.nodes) CHECK(z.real() > 0.0);
    // enclosure in the log plane: inside the ellipse with foci center +- focal
    const double major = 2.0 * r.focal * std::cosh(r.eta);
    for (double s : {smin, std::sqrt(smin * smax), smax}) {
      const double w = std::log(s);
      CHECK(std::abs(w - r.center - r.focal) + std::abs(w - r.center + r.focal) < major);
    }
    Eigen::VectorXd m = Eigen::VectorXd::Ones(3), s(3);
    s << smin, 177.0, smax;
    DiagonalPencil P(m, s);
    for (double beta : {0.6, 1.0, 1.6}) {
      const Eigen::VectorXd v = ml_apply(r, 0.6, beta, 0.7, 1.0, P, Eigen::VectorXd::Ones(3));
      for (int i = 0; i < 3; ++i) {
        const double ref = std::pow(0.7, beta - 1.0) * scalar_ml(0.6, beta, -std::pow(0.7, 0.6) * std::pow(s(i), power));
        CHECK(std::abs(v(i) - ref) <= 1e-9 * std::abs(ref));
      }
    }
  }
  CHECK(throws_kind([] { dti_nodes(0.0, 1.0); }, ErrorKind::InvalidContour));
  CHECK(throws_kind([] { dti_nodes(-1.0, 1.0); }, ErrorKind::InvalidContour));
  CHECK(throws_kind([] { dti_nodes(2.0, 1.0); }, ErrorKind::InvalidContour));
}

TEST_CASE("exponential reduction for every scheme") {
  const double a = 2.0, t = 0.8, K = 0.5;
  DiagonalPencil P(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, a));
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
  const double ref = std::exp(-K * t * a);
  CHECK(std::abs(ml_apply(cf_nodes(16), 1.0, 1.0, t, K, P, v)(0) - ref) <= 1e-11);
  CHECK(std::abs(ml_apply(pc_nodes(1.0, 1.0), 1.0, 1.0, t, K, P, v)(0) - ref) <= 1e-11);
  CHECK(std::abs(ml_apply(dti_nodes(a, a), 1.0, 1.0, t, K, P, v)(0) - ref) <= 1e-11);
}

TEST_CASE("diagonal operator matches componentwise scalar values") {
  Eigen::VectorXd s(3), v(3);
  s << 1.0, 4.0, 9.0;
  v << 1.0, -2.0, 0.5;
  DiagonalPencil P(Eigen::VectorXd::Ones(3), s);
  const double g = 0.6, t = 1.3, K = 0.7;
  std::vector<ContourRule> rules{cf_nodes(16), pc_nodes(g, 1.0), dti_nodes(1.0, 9.0)};
  for (const auto& rule : rules)
    for (double beta : {1.0, g + 1.0, 2.5}) {
      const Eigen::VectorXd y = ml_apply(rule, g, beta, t, K, P, v);
      for (int i = 0; i < 3; ++i) {
        const double ref = ml_kernel(g, beta, K * s(i), t) * v(i);
        CHECK(std::abs(y(i) - ref) <= 1e-10 * std::abs(ref));
      }
    }
}

TEST_CASE("PC agrees with CF on a 64-dof Laplacian") {
  auto P = laplacian_pencil(6);  // 63 interior nodes plus one: use J = 6 with a random vector of the pencil size
  std::mt19937 rng(5);
  const Eigen::VectorXd v = random_vector(rng, P->size());
  for (double beta : {1.0, 1.6}) {
    const Eigen::VectorXd a = ml_apply(cf_nodes(16), 0.6, beta, 1.0, 1.0, *P, v);
    const Eigen::VectorXd b = ml_apply(pc_nodes(0.6, beta), 0.6, beta, 1.0, 1.0, *P, v);
    CHECK(rel(b, a) <= 1e-10);
  }
}

TEST_CASE("three schemes agree on a 127-dof Laplacian") {
  auto P = laplacian_pencil(7);
  const auto [lo, hi] = spectral_bounds(*P);
  CHECK(lo == doctest::Approx(kPi * kPi).epsilon(1e-3));
  const double g = 0.6;
  const auto cf = cf_nodes(16), pc = pc_nodes(g, 1.0), dti = dti_nodes(lo, hi);
  std::mt19937 rng(9);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd v = random_vector(rng, P->size());
    for (double beta : {1.0, g, g + 1.0, g + 3.0}) {
      const Eigen::VectorXd a = ml_apply(cf, g, beta, 1.0, 1.0, *P, v);
      const Eigen::VectorXd b = ml_apply(pc, g, beta, 1.0, 1.0, *P, v);
      const Eigen::VectorXd c = ml_apply(dti, g, beta, 1.0, 1.0, *P, v);
      for (double e : {rel(a, b), rel(a, c), rel(b, c)}) track(worst, e);
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("conjugate expansion, determinism and error propagation") {
  auto P = laplacian_pencil(6);
  std::mt19937 rng(2);
  const Eigen::VectorXd v = random_vector(rng, P->size());
  for (const auto& rule : {cf_nodes(16), pc_nodes(0.6, 1.0)}) {
    double resid = 1.0;
    MlOptions o;
    o.expand_conjugates = true;
    o.imag_residue = &resid;
    const Eigen::VectorXd full = ml_apply(rule, 0.6, 1.0, 0.5, 1.0, *P, v, o);
    const Eigen::VectorXd half = ml_apply(rule, 0.6, 1.0, 0.5, 1.0, *P, v);
    CHECK(resid <= 1e-12);
    CHECK(rel(full, half) <= 1e-12);
  }
  const auto rule = cf_nodes(16);
  std::vector<MlTerm> terms;
  for (int k = 1; k <= 6; ++k) terms.push_back({0.6 + 0.5 * k, 0.25 * k, v});
  MlOptions serial;
  serial.exec = Exec::Serial;
  const Eigen::VectorXd a = ml_apply(rule, 0.6, 1.0, *P, terms);
  const Eigen::VectorXd b = ml_apply(rule, 0.6, 1.0, *P, terms);
  const Eigen::VectorXd c = ml_apply(rule, 0.6, 1.0, *P, terms, serial);
  CHECK((a.array() == b.array()).all());
  CHECK((a.array() == c.array()).all());

  // node 3 fails: the error carries its index
  const double t = 1.0, g = 0.6;
  FailingPencil F(std::pow(rule.nodes[3], g));
  for (Exec ex : {Exec::Serial, Exec::Parallel}) {
    MlOptions o;
    o.exec = ex;
    try {
      ml_apply(rule, g, 1.0, t, 1.0, F, Eigen::VectorXd::Ones(1), o);
      CHECK_MESSAGE(false, "expected a solve failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularMatrix);
      CHECK(e.detail() == 3.0);
    }
  }
  CHECK(throws_kind([&] { ml_apply(rule, g, 1.0, t, 1.0, *P, Eigen::VectorXd::Ones(3)); }, ErrorKind::DimensionMismatch));
  CHECK(throws_kind([&] { ml_apply(rule, g, 1.0, 0.0, 1.0, *P, v); }, ErrorKind::InvalidParameter));
}

TEST_CASE("spectral bounds reject non-symmetric pencils") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2, 2), S(2, 2);
  S << 2.0, 1.0, -1.0, 2.0;
  DensePencil P(M, S);
  CHECK_FALSE(P.symmetric());
  CHECK(throws_kind([&] { spectral_bounds(P); }, ErrorKind::InvalidModel));
  S << 1.0, 0.0, 0.0, -1.0;
  DensePencil Q(M, S);
  CHECK(throws_kind([&] { spectral_bounds(Q); }, ErrorKind::IndefiniteForm));
  CHECK(scheme_from_string("PC") == Scheme::PC);
  CHECK(throws_kind([] { scheme_from_string("talbot"); }, ErrorKind::InvalidParameter));
}
