#include "tfde/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <map>
#include <set>

#include "tfde/error.hpp"
#include "tfde/krylov.hpp"
#include "tfde/mittag_leffler.hpp"
#include "tfde/wavelet_precond.hpp"

namespace tfde {

namespace {

constexpr double kPi = std::numbers::pi;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

SpaceModelSpec example1_spec(double alpha, double lambda, double beta, double q) {
  auto ex = manufactured_rhs_example1(alpha, lambda, beta, q);
  SpaceModelSpec s;
  s.alpha = alpha;
  s.lambda = lambda;
  s.p = 1.0;
  s.m = ex.m;
  s.f = ex.f;
  return s;
}

struct PrecondSolve {
  Eigen::VectorXd U;
  GmresReport report;
};

PrecondSolve wavelet_gmres(const AssembledSystem& sys, double tol) {
  FwtPlan plan(sys.mesh.J, sys.mesh.h);
  LinearMap<double> A = [&sys](const Eigen::VectorXd& v) { return sys.apply<double>(v); };
  const DiagScaling d = build_diag(plan, A, sys.translation_invariant);
  LinearMap<double> B = [&](const Eigen::VectorXd& v) { return preconditioned_apply(plan, d, A, v); };
  PrecondSolve out;
  const Eigen::VectorXd rhs = d.d.cwiseProduct(plan.transpose_apply(sys.load));
  const Eigen::VectorXd y = gmres<double>(B, rhs, tol, sys.dofs(), out.report);
  out.U = plan.apply(d.d.cwiseProduct(y));
  return out;
}

}  // namespace

Example1Row example1_row(const std::string& method, double alpha, double lambda, double q, double beta, int J,
                         bool iterative, double tol) {
  const UniformMesh mesh({0.0, 1.0}, J);
  const auto spec = example1_spec(alpha, lambda, beta, q);
  const auto ex = manufactured_rhs_example1(alpha, lambda, beta, q);
  AssembledSystem sys;
  if (method == "galerkin") sys = assemble_galerkin(spec, mesh, BasisKind::Linear);
  else if (method == "petrov-galerkin") sys = assemble_petrov_galerkin(spec, mesh, BasisKind::Linear);
  else throw Error(ErrorKind::ConfigError, "unknown method '" + method + "'");
  Example1Row row;
  Eigen::VectorXd U;
  if (iterative) {
    auto s = wavelet_gmres(sys, tol);
    U = s.U;
    row.iterations = s.report.iterations;
    row.converged = s.report.converged;
  } else {
    U = dense_solve(sys.dense(), sys.load);
  }
  const auto e = error_norms(sys, U, ex.exact.u);
  row.l2 = e.l2;
  row.energy = e.energy;
  return row;
}

PrecondRow precond_row(double alpha, double lambda, double beta, int J, double tol, bool identity) {
  const UniformMesh mesh({0.0, 1.0}, J);
  const int n = mesh.N - 1;
  FwtPlan plan(J, mesh.h);
  AssembledSystem sys;
  LinearMap<double> A;
  bool ti = true;
  if (identity) {
    A = [](const Eigen::VectorXd& v) { return v; };
  } else {
    sys = assemble_galerkin(example1_spec(alpha, lambda, beta, 0.0), mesh, BasisKind::Linear);
    A = [&sys](const Eigen::VectorXd& v) { return sys.apply<double>(v); };
    ti = sys.translation_invariant;
  }
  const DiagScaling d = build_diag(plan, A, ti);
  LinearMap<double> B = [&](const Eigen::VectorXd& v) { return preconditioned_apply(plan, d, A, v); };
  PrecondRow row;
  row.cond_before = condition_number(densify(A, n));
  row.cond_after = condition_number(densify(B, n));
  const Eigen::VectorXd b = identity ? Eigen::VectorXd::Ones(n) : sys.load;
  GmresReport r1, r2;
  gmres<double>(A, b, tol, n, r1);
  gmres<double>(B, Eigen::VectorXd(d.d.cwiseProduct(plan.transpose_apply(b))), tol, n, r2);
  row.iter_before = r1.iterations;
  row.iter_after = r2.iterations;
  return row;
}

double example2_error(const Example2Params& p, int J, Scheme scheme, bool iterative) {
  TimeModelSpec sp;
  sp.gamma = p.gamma;
  sp.K = p.K;
  sp.T = p.T;
  sp.op = SpaceOperator::TemperedFractional;
  sp.alpha = p.alpha;
  sp.space_lambda = p.lambda;
  const double lam = p.lambda, a = p.alpha, K = p.K;
  auto w = [lam](double x) { return std::exp(-lam * x) * (x * x * x - x * x); };
  auto dw = [lam](double x) { return std::exp(-lam * x) * (3 * x * x - 2 * x - lam * (x * x * x - x * x)); };
  sp.g = w;
  // -K aD^{alpha,lambda} w
  RhsDescription f2;
  f2.regular = [=](double x) { return K * (std::pow(lam, a) * w(x) + a * std::pow(lam, a - 1.0) * dw(x)); };
  f2.singular.push_back({[=](double x) { return -K * 6.0 / std::tgamma(4.0 - a) * std::exp(-lam * x); }, 3.0 - a, false});
  f2.singular.push_back({[=](double x) { return K * 2.0 / std::tgamma(3.0 - a) * std::exp(-lam * x); }, 2.0 - a, false});
  const UniformMesh mesh({0.0, 1.0}, J);
  const auto sd = discretize(sp, mesh, BasisKind::Linear, iterative);
  const auto ctx = make_context(sp, sd, scheme);
  const Eigen::VectorXd gh = sd.project(w);
  const Eigen::VectorXd v2 = sd.mass_solve(assemble_load(f2, mesh, BasisKind::Linear));
  const double b = p.beta, g = p.gamma;
  const Eigen::VectorXd U =
      solve_homogeneous(ctx, sd, 0.0, p.T, gh) +
      source_power_ml(ctx, p.T,
                      {{b - g + 1.0, std::tgamma(b + 1.0) / std::tgamma(b + 1.0 - g) * gh}, {1.0, v2}, {b + 1.0, v2}});
  const double amp = 1.0 + std::pow(p.T, b);
  return l2_error(mesh, BasisKind::Linear, U, [&](double x) { return amp * w(x); });
}

double flap_error(double gamma, double alpha, double T, int J) {
  TimeModelSpec sp;
  sp.gamma = gamma;
  sp.alpha = alpha;
  sp.op = SpaceOperator::FractionalLaplacian;
  sp.K = 1.0;
  sp.T = T;
  sp.g = [](double x) { return 5.0 * std::sin(kPi * x) * (std::cos(2.0 * kPi * x) - 1.0); };
  const UniformMesh mesh({0.0, 1.0}, J);
  const auto sd = discretize(sp, mesh, BasisKind::Linear);
  const auto ctx = make_context(sp, sd, Scheme::DTI);
  const Eigen::VectorXd U = solve_homogeneous(ctx, sd, 0.0, T, sd.project(sp.g));
  const double e1 = scalar_ml(gamma, 1.0, -std::pow(T, gamma) * std::pow(kPi, alpha));
  const double e3 = scalar_ml(gamma, 1.0, -std::pow(T, gamma) * std::pow(3.0 * kPi, alpha));
  return l2_error(mesh, BasisKind::Linear, U,
                  [&](double x) { return -7.5 * e1 * std::sin(kPi * x) + 2.5 * e3 * std::sin(3.0 * kPi * x); });
}

double example3_w(const Example3Params& p, double t) {
  const double b = p.beta, g = p.gamma;
  return std::tgamma(b + 1.0) / std::tgamma(b - g + 1.0) * std::pow(t, b - g) + std::pow(t, b) + 1.0;
}

namespace {

TimeModelSpec example3_spec(const Example3Params& p) {
  TimeModelSpec sp;
  sp.gamma = p.gamma;
  sp.lambda = p.lambda;
  sp.K = p.K > 0.0 ? p.K : 1.0 / (kPi * kPi);
  sp.T = p.T;
  sp.g = [](double x) { return std::sin(kPi * x); };
  return sp;
}

double example3_l2(const Example3Params& p, const UniformMesh& mesh, const Eigen::VectorXd& U) {
  const double amp = std::exp(-p.lambda * p.T) * (std::pow(p.T, p.beta) + 1.0);
  return l2_error(mesh, BasisKind::Quadratic, U, [&](double x) { return amp * std::sin(kPi * x); });
}

}  // namespace

Example3Run example3_run(const Example3Params& p, int J, Scheme scheme) {
  const auto sp = example3_spec(p);
  const UniformMesh mesh({0.0, 1.0}, J);
  const auto sd = discretize(sp, mesh, BasisKind::Quadratic);
  // rule construction (and the DTI eigenvalue bounds) excluded from the solve time
  const auto ctx = make_context(sp, sd, scheme, p.n1);
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXd gh = sd.project(sp.g);
  const double T = p.T, b = p.beta, g = p.gamma;
  Eigen::VectorXd src;
  if (p.source == "exact") {
    src = source_power_ml(ctx, T, {{b - g + 1.0, std::tgamma(b + 1.0) / std::tgamma(b - g + 1.0) * gh}, {b + 1.0, gh}, {1.0, gh}});
  } else if (p.source == "piecewise") {
    const int M = p.partitions > 0 ? p.partitions : (1 << J);
    std::vector<double> br(M + 1);
    for (int k = 0; k <= M; ++k) br[k] = T * k / M;
    br.back() = T;
    src = source_piecewise(ctx, T, piecewise_quadratic([&](double s) { return Eigen::VectorXd(example3_w(p, s) * gh); }, br));
  } else if (p.source == "chebyshev") {
    src = source_chebyshev(ctx, chebyshev_interpolant([&](double s) { return Eigen::VectorXd(example3_w(p, s) * gh); }, T,
                                                     p.chebyshev_degree));
  } else {
    throw Error(ErrorKind::ConfigError, "unknown source handling '" + p.source + "'");
  }
  Example3Run run;
  run.U = solve_homogeneous(ctx, sd, p.lambda, T, gh) + std::exp(-p.lambda * T) * src;
  run.solve_ms = ms_since(t0);
  run.l2 = example3_l2(p, mesh, run.U);
  return run;
}

Example3Run example3_l1(const Example3Params& p, int J, int steps, Exec exec) {
  const auto sp = example3_spec(p);
  const UniformMesh mesh({0.0, 1.0}, J);
  const auto sd = discretize(sp, mesh, BasisKind::Quadratic);
  RhsDescription fg;
  fg.regular = sp.g;
  const Eigen::VectorXd Fg = assemble_load(fg, mesh, BasisKind::Quadratic);
  const Eigen::VectorXd gh = sd.mass_solve(Fg);
  const auto res = l1_baseline(sp, sd, gh, [&](double t) { return Eigen::VectorXd(example3_w(p, t) * Fg); }, steps, exec);
  Example3Run run;
  run.U = res.U;
  run.solve_ms = res.wall_ms;
  run.l2 = example3_l2(p, mesh, run.U);
  return run;
}

// ---------------------------------------------------------------- harness

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids{"ex1", "ex2", "ex2-flap", "ex3", "ml-eval", "precond-study"};
  return ids;
}

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

const std::set<std::string>& allowed_keys(const std::string& ex) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"ex1", {"method", "alpha", "lambda", "q", "beta", "J", "basis", "tolerance"}},
      {"precond-study", {"alpha", "lambda", "q", "beta", "J", "tolerance", "operator"}},
      {"ex2", {"gamma", "alpha", "lambda", "beta", "T", "K", "J", "scheme", "basis"}},
      {"ex2-flap", {"gamma", "alpha", "T", "J", "scheme", "basis"}},
      {"ex3", {"gamma", "lambda", "beta", "T", "K", "J", "scheme", "source", "partitions", "chebyshev_degree", "N1",
               "basis", "l1_steps", "l1_budget_s"}},
      {"ml-eval", {"gamma", "beta", "z", "N1", "scheme"}}};
  return keys.at(ex);
}

double num(const nlohmann::json& p, const char* key, double dflt) {
  if (!p.contains(key)) return dflt;
  if (!p.at(key).is_number()) config_error(std::string("parameter '") + key + "' must be a number");
  return p.at(key).get<double>();
}

std::string str(const nlohmann::json& p, const char* key, const std::string& dflt) {
  if (!p.contains(key)) return dflt;
  if (!p.at(key).is_string()) config_error(std::string("parameter '") + key + "' must be a string");
  return p.at(key).get<std::string>();
}

std::vector<int> levels(const nlohmann::json& p, std::vector<int> dflt, int lo, int hi) {
  std::vector<int> J = dflt;
  if (p.contains("J")) {
    const auto& j = p.at("J");
    J.clear();
    if (j.is_number_integer()) J.push_back(j.get<int>());
    else if (j.is_array())
      for (const auto& v : j) {
        if (!v.is_number_integer()) config_error("J entries must be integers");
        J.push_back(v.get<int>());
      }
    else config_error("J must be an integer or a list of integers");
  }
  if (J.empty()) config_error("J list is empty");
  for (int v : J)
    if (v < lo || v > hi) config_error("J = " + std::to_string(v) + " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
  if (!std::is_sorted(J.begin(), J.end()) || std::adjacent_find(J.begin(), J.end()) != J.end())
    config_error("J list must be strictly increasing");
  return J;
}

std::string scheme_of(const ExperimentConfig& cfg, const std::string& dflt) {
  std::string s = cfg.scheme.empty() ? str(cfg.params, "scheme", dflt) : cfg.scheme;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void require(bool ok, const std::string& msg) {
  if (!ok) config_error(msg);
}

int l1_steps(const nlohmann::json& p, int J, double gamma) {
  if (!p.contains("l1_steps")) return 1 << (2 * J);
  const auto& v = p.at("l1_steps");
  if (v.is_number_integer()) return v.get<int>();
  if (v == "square") return 1 << (2 * J);
  if (v == "coupled") return static_cast<int>(std::ceil(std::pow(2.0, 3.0 * J / (2.0 - gamma)) * (1.0 - 1e-12)));
  config_error("l1_steps must be an integer, \"square\" or \"coupled\"");
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  const auto& ids = example_ids();
  if (std::find(ids.begin(), ids.end(), cfg.example) == ids.end()) config_error("unknown example '" + cfg.example + "'");
  if (!cfg.params.is_object()) config_error("config must be a JSON object");
  const auto& keys = allowed_keys(cfg.example);
  for (const auto& [k, v] : cfg.params.items())
    if (!keys.count(k)) config_error("unknown parameter '" + k + "' for " + cfg.example);
  const auto& p = cfg.params;
  const std::string ex = cfg.example;
  if (ex == "ex1" || ex == "precond-study") {
    const double a = num(p, "alpha", 1.4), l = num(p, "lambda", 3.0), q = num(p, "q", 0.0), b = num(p, "beta", 3.0);
    require(a > 1.0 && a < 2.0, "alpha must lie in (1,2)");
    require(l >= 0.0, "lambda must be nonnegative");
    require(q >= 0.0, "q must be nonnegative");
    require(b > a / 2.0, "beta must exceed alpha/2");
    require(num(p, "tolerance", 1e-8) > 0.0, "tolerance must be positive");
    require(str(p, "basis", "linear") == "linear", "this example uses linear elements");
    if (ex == "ex1") {
      const std::string m = str(p, "method", "galerkin");
      require(m == "galerkin" || m == "petrov-galerkin", "method must be galerkin or petrov-galerkin");
      levels(p, {6, 7, 8}, 2, 11);
    } else {
      require(q == 0.0, "the preconditioning study needs q = 0");
      const std::string op = str(p, "operator", "fractional");
      require(op == "fractional" || op == "identity", "operator must be fractional or identity");
      levels(p, {7, 8, 9}, 2, 10);
    }
    require(cfg.scheme.empty(), "--scheme does not apply to " + ex);
  } else if (ex == "ex2") {
    const double g = num(p, "gamma", 1.0 / 3.0), a = num(p, "alpha", 1.2);
    require(g > 0.0 && g < 1.0, "gamma must lie in (0,1)");
    require(a > 1.0 && a < 2.0, "alpha must lie in (1,2)");
    require(num(p, "lambda", 3.0) >= 0.0, "lambda must be nonnegative");
    require(num(p, "beta", 1.0) > 0.0, "beta must be positive");
    require(num(p, "T", 2.0) > 0.0 && num(p, "K", 1.0) > 0.0, "T and K must be positive");
    require(str(p, "basis", "linear") == "linear", "this example uses linear elements");
    const std::string s = scheme_of(cfg, "cf");
    require(s == "cf" || s == "pc", "example 2 admits the cf and pc schemes (the operator has non-real eigenvalues)");
    levels(p, {6, 7, 8, 9}, 2, 10);
  } else if (ex == "ex2-flap") {
    const double g = num(p, "gamma", 0.3), a = num(p, "alpha", 1.2);
    require(g > 0.0 && g < 1.0, "gamma must lie in (0,1)");
    require(a > 0.0 && a <= 2.0, "alpha must lie in (0,2]");
    require(num(p, "T", 5.0) > 0.0, "T must be positive");
    require(str(p, "basis", "linear") == "linear", "this example uses linear elements");
    require(scheme_of(cfg, "dti") == "dti", "the fractional Laplacian variant needs the dti scheme");
    levels(p, {7, 8, 9}, 2, 11);
  } else if (ex == "ex3") {
    const double g = num(p, "gamma", 0.6);
    require(g > 0.0 && g < 1.0, "gamma must lie in (0,1)");
    require(num(p, "lambda", 1.0) >= 0.0, "lambda must be nonnegative");
    require(num(p, "beta", 4.0) > g, "beta must exceed gamma");
    require(num(p, "T", 1.0) > 0.0 && num(p, "K", 1.0) > 0.0, "T and K must be positive");
    require(str(p, "basis", "quadratic") == "quadratic", "example 3 uses quadratic elements");
    const std::string s = scheme_of(cfg, "cf");
    require(s == "cf" || s == "pc" || s == "dti" || s == "l1", "scheme must be cf, pc, dti or l1");
    const std::string src = str(p, "source", "piecewise");
    require(src == "piecewise" || src == "chebyshev" || src == "exact", "source must be piecewise, chebyshev or exact");
    const int deg = static_cast<int>(num(p, "chebyshev_degree", 16));
    require(deg >= 0 && deg <= 20, "chebyshev_degree must lie in [0,20]");
    require(num(p, "partitions", 0) >= 0, "partitions must be nonnegative");
    if (p.contains("l1_steps")) l1_steps(p, 1, g);
    levels(p, {7, 8, 9}, 2, 10);
  } else if (ex == "ml-eval") {
    const double g = num(p, "gamma", 0.6);
    require(g > 0.0, "gamma must be positive");
    require(num(p, "beta", 1.0) > 0.0, "beta must be positive");
    const int n1 = static_cast<int>(num(p, "N1", 16));
    require(n1 >= 8 && n1 <= 20 && n1 % 2 == 0, "N1 must be even in [8,20]");
    if (p.contains("z")) require(p.at("z").is_array(), "z must be a list of numbers");
    require(scheme_of(cfg, "cf") == "cf", "ml-eval reports the cf rule");
  }
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto& p = cfg.params;
  ResultTable table;
  table.example = cfg.example;
  table.config = p;
  if (cfg.iterative) table.config["iterative"] = true;
  if (!cfg.scheme.empty()) table.config["scheme"] = cfg.scheme;
  const std::string ex = cfg.example;

  if (ex == "ex1") {
    const std::string method = str(p, "method", "galerkin");
    const double a = num(p, "alpha", 1.4), l = num(p, "lambda", 3.0), q = num(p, "q", 0.0), b = num(p, "beta", 3.0);
    const double tol = num(p, "tolerance", 1e-8);
    for (int J : levels(p, {6, 7, 8}, 2, 11)) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = example1_row(method, a, l, q, b, J, cfg.iterative, tol);
      const double ms = ms_since(t0);
      ResultRow e{J, "energy", r.energy};
      ResultRow m{J, "l2", r.l2};
      e.iterations = m.iterations = r.iterations;
      e.flagged = m.flagged = !r.converged;
      e.wall_ms = m.wall_ms = ms;
      table.rows.push_back(e);
      table.rows.push_back(m);
    }
    table.fill_rates("energy");
    table.fill_rates("l2");
  } else if (ex == "precond-study") {
    const double a = num(p, "alpha", 1.7), l = num(p, "lambda", 3.0), b = num(p, "beta", 3.0);
    const bool identity = str(p, "operator", "fractional") == "identity";
    for (int J : levels(p, {7, 8, 9}, 2, 10)) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = precond_row(a, l, b, J, num(p, "tolerance", 1e-8), identity);
      const double ms = ms_since(t0);
      ResultRow c0{J, "cond_before", r.cond_before};
      ResultRow c1{J, "cond_after", r.cond_after};
      ResultRow i0{J, "iterations_before", static_cast<double>(r.iter_before)};
      ResultRow i1{J, "iterations_after", static_cast<double>(r.iter_after)};
      i0.iterations = r.iter_before;
      i1.iterations = r.iter_after;
      for (ResultRow* row : {&c0, &c1, &i0, &i1}) {
        row->cond_before = r.cond_before;
        row->cond_after = r.cond_after;
        row->wall_ms = ms;
        table.rows.push_back(*row);
      }
    }
    table.fill_rates("cond_before", true);
    table.fill_rates("cond_after", true);
  } else if (ex == "ex2") {
    Example2Params ep;
    ep.gamma = num(p, "gamma", ep.gamma);
    ep.alpha = num(p, "alpha", ep.alpha);
    ep.lambda = num(p, "lambda", ep.lambda);
    ep.beta = num(p, "beta", ep.beta);
    ep.T = num(p, "T", ep.T);
    ep.K = num(p, "K", ep.K);
    const Scheme s = scheme_from_string(scheme_of(cfg, "cf"));
    const auto Js = levels(p, {6, 7, 8, 9}, 2, 10);
    std::vector<double> x, y;
    for (int J : Js) {
      const auto t0 = std::chrono::steady_clock::now();
      ResultRow r{J, "l2", example2_error(ep, J, s, cfg.iterative)};
      r.wall_ms = ms_since(t0);
      table.rows.push_back(r);
      x.push_back(J);
      y.push_back(std::log2(r.value));
    }
    table.fill_rates("l2");
    if (Js.size() >= 2) {
      const double n = static_cast<double>(x.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
      }
      table.rows.push_back({Js.back(), "l2_slope", (n * sxy - sx * sy) / (n * sxx - sx * sx)});
    }
  } else if (ex == "ex2-flap") {
    const double g = num(p, "gamma", 0.3), a = num(p, "alpha", 1.2), T = num(p, "T", 5.0);
    for (int J : levels(p, {7, 8, 9}, 2, 11)) {
      const auto t0 = std::chrono::steady_clock::now();
      ResultRow r{J, "l2", flap_error(g, a, T, J)};
      r.wall_ms = ms_since(t0);
      table.rows.push_back(r);
    }
    table.fill_rates("l2");
  } else if (ex == "ex3") {
    Example3Params ep;
    ep.gamma = num(p, "gamma", ep.gamma);
    ep.lambda = num(p, "lambda", ep.lambda);
    ep.beta = num(p, "beta", ep.beta);
    ep.T = num(p, "T", ep.T);
    ep.K = num(p, "K", 0.0);
    ep.source = str(p, "source", ep.source);
    ep.partitions = static_cast<int>(num(p, "partitions", 0));
    ep.chebyshev_degree = static_cast<int>(num(p, "chebyshev_degree", 16));
    ep.n1 = static_cast<int>(num(p, "N1", 0));
    const std::string s = scheme_of(cfg, "cf");
    const double budget_s = num(p, "l1_budget_s", 600.0);
    for (int J : levels(p, {7, 8, 9}, 2, 10)) {
      ResultRow r{J, "l2"};
      if (s == "l1") {
        const int steps = l1_steps(p, J, ep.gamma);
        const double n = 2.0 * (1 << J) - 1.0;
        // history sums dominate: ~steps^2 n flops at ~1 Gflop/s
        const double est_s = static_cast<double>(steps) * steps * n * 1e-9;
        if (est_s > budget_s) {
          r.flagged = true;
          table.notes.push_back("J=" + std::to_string(J) + ": L1 run skipped, estimated " + std::to_string(est_s) +
                                " s exceeds the budget");
        } else {
          const auto run = example3_l1(ep, J, steps);
          r.value = run.l2;
          r.iterations = steps;
          r.wall_ms = run.solve_ms;
        }
      } else {
        const auto run = example3_run(ep, J, scheme_from_string(s));
        r.value = run.l2;
        r.wall_ms = run.solve_ms;
      }
      table.rows.push_back(r);
    }
    table.fill_rates("l2");
  } else if (ex == "ml-eval") {
    const double g = num(p, "gamma", 0.6), b = num(p, "beta", 1.0);
    std::vector<double> zs{-10.0, -1.0, 0.0, 1.0};
    if (p.contains("z")) {
      zs.clear();
      for (const auto& v : p.at("z")) {
        if (!v.is_number()) config_error("z entries must be numbers");
        zs.push_back(v.get<double>());
      }
    }
    for (size_t i = 0; i < zs.size(); ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      ResultRow r{static_cast<int>(i), "ml", scalar_ml(g, b, zs[i])};
      r.wall_ms = ms_since(t0);
      table.rows.push_back(r);
    }
    const int n1 = static_cast<int>(num(p, "N1", 16));
    const auto t0 = std::chrono::steady_clock::now();
    ResultRow r{n1, "cf_max_error"};
    try {
      r.value = cf_nodes(n1).predicted_error;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AccuracyFailure) throw;
      r.value = e.detail();
      r.flagged = true;
      table.notes.push_back(e.what());
    }
    r.wall_ms = ms_since(t0);
    table.rows.push_back(r);
  }
  return table;
}

}  // namespace tfde
