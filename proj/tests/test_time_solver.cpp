#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "tfde/bench.hpp"
#include "tfde/error.hpp"
#include "tfde/time_solver.hpp"

using namespace tfde;

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

TimeModelSpec heat_like(double gamma, double lambda, double K) {
  TimeModelSpec sp;
  sp.gamma = gamma;
  sp.lambda = lambda;
  sp.K = K;
  sp.g = [](double x) { return std::sin(kPi * x); };
  return sp;
}

// gamma = 1 context on a diagonal pencil; bypasses the model validation on purpose
MlContext scalar_context(double gamma, const Eigen::VectorXd& s, Scheme scheme = Scheme::CF) {
  MlContext ctx;
  ctx.gamma = gamma;
  ctx.K = 1.0;
  ctx.pencil = std::make_shared<DiagonalPencil>(Eigen::VectorXd::Ones(s.size()), s);
  ctx.rule = scheme == Scheme::CF ? cf_nodes(16) : pc_nodes(gamma, 1.0);
  return ctx;
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("homogeneous solution near the heat limit") {
  const double lambda = 0.5, t = 1.0;
  const auto sp = heat_like(0.999, lambda, 1.0 / (kPi * kPi));
  const UniformMesh mesh({0.0, 1.0}, 5);
  const auto sd = discretize(sp, mesh, BasisKind::Quadratic);
  const auto gh = sd.project(sp.g);
  for (Scheme s : {Scheme::CF, Scheme::PC, Scheme::DTI}) {
    const auto ctx = make_context(sp, sd, s);
    const auto U = solve_homogeneous(ctx, sd, lambda, t, gh);
    const double amp = std::exp(-lambda * t) * std::exp(-t);
    const double err = l2_error(mesh, BasisKind::Quadratic, U, [&](double x) { return amp * std::sin(kPi * x); });
    CHECK(err / (amp * std::sqrt(0.5)) <= 1e-2);
  }
}

TEST_CASE("homogeneous solution at small time returns the projection") {
  const auto sp = heat_like(0.9, 0.0, 1.0);
  const UniformMesh mesh({0.0, 1.0}, 5);
  const auto sd = discretize(sp, mesh, BasisKind::Linear);
  const auto gh = sd.project(sp.g);
  const auto ctx = make_context(sp, sd, Scheme::CF);
  const auto U = solve_homogeneous(ctx, sd, 0.0, 1e-6, gh);
  CHECK(rel(U, gh) <= 1e-4);
}

TEST_CASE("discrete stability for random initial data") {
  auto sp = heat_like(0.6, 0.5, 1.0);
  const UniformMesh mesh({0.0, 1.0}, 5);
  const auto sd = discretize(sp, mesh, BasisKind::Linear);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Scheme s : {Scheme::CF, Scheme::PC, Scheme::DTI}) {
    const auto ctx = make_context(sp, sd, s);
    int violations = 0;
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd g(sd.dofs());
      for (int i = 0; i < g.size(); ++i) g(i) = u(rng);
      for (double t : {0.1, 1.0, 5.0}) {
        const auto U = solve_homogeneous(ctx, sd, sp.lambda, t, g, false);
        if (sd.h1_seminorm(U) > sd.h1_seminorm(g) * (1.0 + 1e-8)) ++violations;
      }
    }
    CHECK(violations == 0);
  }
  // inflated weights must trip the runtime check
  auto ctx = make_context(sp, sd, Scheme::CF);
  for (auto& w : ctx.rule.weights) w *= 3.0;
  const auto gh = sd.project(sp.g);
  CHECK(throws_kind([&] { solve_homogeneous(ctx, sd, 0.0, 1e-3, gh); }, ErrorKind::StabilityViolation));
}

TEST_CASE("power source terms") {
  // gamma = 1, nu = 1: integral of e^{-q (t-s)} equals (1 - e^{-q t}) / q
  Eigen::VectorXd s(3);
  s << 0.5, 2.0, 7.0;
  const auto ctx = scalar_context(1.0, s);
  const double t = 1.3;
  const Eigen::VectorXd y = source_power_ml(ctx, t, {{1.0, Eigen::VectorXd::Ones(3)}});
  for (int i = 0; i < 3; ++i) CHECK(std::abs(y(i) - (-std::expm1(-s(i) * t)) / s(i)) <= 1e-12);
  CHECK(throws_kind([&] { source_power_ml(ctx, t, {{0.0, Eigen::VectorXd::Ones(3)}}); }, ErrorKind::InvalidParameter));
  CHECK(throws_kind([&] { source_power_ml(ctx, t, {{-0.5, Eigen::VectorXd::Ones(3)}}); }, ErrorKind::InvalidParameter));
}

TEST_CASE("piecewise sources") {
  Eigen::VectorXd s(2);
  s << 1.0, 30.0;
  const auto ctx = scalar_context(0.6, s);
  const double t = 1.0;
  const Eigen::VectorXd a = Eigen::VectorXd::Ones(2), b = Eigen::VectorXd::LinSpaced(2, -1.0, 2.0),
                        c = Eigen::VectorXd::Constant(2, 0.5);

  SUBCASE("a global quadratic on one interval collapses to power terms") {
    auto q = [&](double x) { return Eigen::VectorXd(a + x * b + x * x * c); };
    const auto rep = piecewise_quadratic(q, {0.0, t});
    const auto y = source_piecewise(ctx, t, rep);
    const auto ref = source_power_ml(ctx, t, {{1.0, a}, {2.0, b}, {3.0, c}});
    CHECK(rel(y, ref) <= 1e-12);
    // also on several intervals
    const auto y4 = source_piecewise(ctx, t, piecewise_quadratic(q, {0.0, 0.1, 0.35, 0.8, t}));
    CHECK(rel(y4, ref) <= 1e-12);
  }

  SUBCASE("halving the interval width gains a factor of about eight") {
    auto q = [](double x) { return vec1(std::exp(x) * std::cos(3.0 * x)); };
    const auto one = scalar_context(0.6, Eigen::VectorXd::Constant(1, 5.0));
    auto run = [&](int m) {
      std::vector<double> br(m + 1);
      for (int k = 0; k <= m; ++k) br[k] = t * k / m;
      return source_piecewise(one, t, piecewise_quadratic(q, br))(0);
    };
    // reference: degree-20 Chebyshev interpolation of the same smooth source
    const double ref = source_chebyshev(one, chebyshev_interpolant(q, t, 20))(0);
    double prev = std::abs(run(4) - ref);
    for (int m : {8, 16, 32}) {
      const double e = std::abs(run(m) - ref);
      const double rate = std::log2(prev / e);
      CHECK(rate == doctest::Approx(3.0).epsilon(0.1));
      prev = e;
    }
  }

  SUBCASE("inconsistent coefficient sets are rejected") {
    auto q = [&](double x) { return Eigen::VectorXd(a + x * b); };
    auto rep = piecewise_quadratic(q, {0.0, 0.5, t});
    rep.right[0][0] += Eigen::VectorXd::Constant(2, 1e-3);
    CHECK(throws_kind([&] { source_piecewise(ctx, t, rep); }, ErrorKind::InvalidInput));
    auto bad = piecewise_quadratic(q, {0.0, 0.5, t});
    bad.breaks = {0.0, 0.7, 0.5};
    CHECK(throws_kind([&] { source_piecewise(ctx, t, bad); }, ErrorKind::InvalidInput));
  }
}

TEST_CASE("Chebyshev sources") {
  const double t = 1.0;
  SUBCASE("a constant source reduces to one power term") {
    Eigen::VectorXd s(2);
    s << 1.0, 30.0;
    const auto ctx = scalar_context(0.6, s);
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(2, 1.0, 3.0);
    const auto rep = chebyshev_interpolant([&](double) { return v; }, t, 0);
    CHECK(rep.coef.size() == 1);
    CHECK(rel(source_chebyshev(ctx, rep), source_power_ml(ctx, t, {{1.0, v}})) <= 1e-14);
    // higher degrees of a constant leave only the constant coefficient
    const auto rep8 = chebyshev_interpolant([&](double) { return v; }, t, 8);
    for (int j = 1; j <= 8; ++j) CHECK(rep8.coef[j].norm() <= 1e-10);
  }

  SUBCASE("interpolation residual for the smooth manufactured source") {
    Example3Params p;
    p.beta = 9.0;
    const double lambda = p.lambda;
    auto q = [&](double s) { return vec1(std::exp(lambda * (s - t)) * example3_w(p, s)); };
    const auto rep = chebyshev_interpolant(q, t, 16);
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double s = t * i / 4000.0;
      double acc = 0.0;
      for (int j = 16; j >= 0; --j) acc = acc * s + rep.coef[j](0);
      worst = std::max(worst, std::abs(acc - q(s)(0)));
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("degree limit") {
    auto q = [](double s) { return vec1(std::exp(s)); };
    CHECK_NOTHROW(chebyshev_interpolant(q, t, 20));
    CHECK(throws_kind([&] { chebyshev_interpolant(q, t, 21); }, ErrorKind::ConditioningFailure));
    const auto pts = chebyshev_points(2.0, 4);
    for (double x : pts) CHECK((x > 0.0 && x < 2.0));
  }
}

TEST_CASE("L1 stepping") {
  const UniformMesh mesh({0.0, 1.0}, 4);

  SUBCASE("integer-order limit is backward Euler") {
    auto sp = heat_like(1.0 - 1e-10, 0.0, 1.0);
    const auto sd = discretize(sp, mesh, BasisKind::Linear);
    const auto gh = sd.project(sp.g);
    const int steps = 40;
    const auto U = l1_baseline(sp, sd, gh, [&](double) { return Eigen::VectorXd(Eigen::VectorXd::Zero(sd.dofs())); }, steps).U;
    const double tau = sp.T / steps;
    Eigen::SparseMatrix<double> A = sd.mass / tau + sp.K * sd.laplacian;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> be(A);
    Eigen::VectorXd V = gh;
    for (int k = 0; k < steps; ++k) V = be.solve(sd.mass * V / tau);
    CHECK(rel(U, V) <= 1e-7);
  }

  SUBCASE("time order two minus gamma") {
    Example3Params p;
    p.gamma = 0.6;
    const int J = 3;
    p.partitions = 512;
    const auto ref = example3_run(p, J, Scheme::CF).U;
    p.partitions = 0;
    double prev = 0.0;
    for (int steps : {64, 128, 256, 512}) {
      const double e = (example3_l1(p, J, steps).U - ref).norm();
      if (prev > 0.0) CHECK(std::log2(prev / e) == doctest::Approx(2.0 - p.gamma).epsilon(0.1 / 1.4));
      prev = e;
    }
  }

  SUBCASE("serial and parallel agree exactly") {
    Example3Params p;
    const auto a = example3_l1(p, 3, 100, Exec::Serial).U;
    const auto b = example3_l1(p, 3, 100, Exec::Parallel).U;
    CHECK((a.array() == b.array()).all());
    std::mt19937 rng(4);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd H(300, 17);
    for (int j = 0; j < H.cols(); ++j)
      for (int i = 0; i < H.rows(); ++i) H(i, j) = nd(rng);
    std::vector<double> w(301);
    for (int l = 0; l <= 300; ++l) w[l] = std::pow(l + 1.0, 0.4) - std::pow(static_cast<double>(l), 0.4);
    Eigen::VectorXd ys, yp;
    l1_history(H, 250, w, ys, Exec::Serial);
    l1_history(H, 250, w, yp, Exec::Parallel);
    CHECK((ys.array() == yp.array()).all());
    // y_i = sum_{j<cols} w[cols-j] H(j, i)
    double direct = 0.0;
    for (int j = 0; j < 250; ++j) direct += w[250 - j] * H(j, 5);
    CHECK(ys(5) == doctest::Approx(direct).epsilon(1e-13));
  }

  SUBCASE("operator restrictions") {
    auto sp = heat_like(0.5, 0.0, 1.0);
    sp.op = SpaceOperator::FractionalLaplacian;
    sp.alpha = 1.5;
    const auto sd = discretize(sp, mesh, BasisKind::Linear);
    const auto gh = sd.project(sp.g);
    CHECK(throws_kind([&] { l1_baseline(sp, sd, gh, [&](double) { return Eigen::VectorXd(gh); }, 10); }, ErrorKind::InvalidModel));
    CHECK(throws_kind([&] { make_context(sp, sd, Scheme::CF); }, ErrorKind::InvalidModel));
    CHECK_NOTHROW(make_context(sp, sd, Scheme::DTI));
  }
}

TEST_CASE("model validation") {
  auto sp = heat_like(1.0, 0.0, 1.0);
  CHECK(throws_kind([&] { validate(sp); }, ErrorKind::InvalidParameter));
  sp.gamma = 0.5;
  sp.K = -1.0;
  CHECK(throws_kind([&] { validate(sp); }, ErrorKind::InvalidParameter));
  sp.K = 1.0;
  CHECK_NOTHROW(validate(sp));
}
