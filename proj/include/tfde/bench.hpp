#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tfde/contour.hpp"
#include "tfde/results.hpp"
#include "tfde/time_solver.hpp"

namespace tfde {

// ---------------------------------------------------------------- single runs

struct Example1Row {
  double l2 = 0.0;
  double energy = 0.0;
  int iterations = -1;
  bool converged = true;
};
// method: "galerkin" or "petrov-galerkin"; iterative uses the wavelet-preconditioned GMRES
Example1Row example1_row(const std::string& method, double alpha, double lambda, double q, double beta, int J,
                         bool iterative = false, double tol = 1e-8);

struct PrecondRow {
  double cond_before = 0.0;
  double cond_after = 0.0;
  int iter_before = 0;
  int iter_after = 0;
};
// identity = true swaps in the identity operator
PrecondRow precond_row(double alpha, double lambda, double beta, int J, double tol = 1e-8, bool identity = false);

struct Example2Params {
  double gamma = 1.0 / 3.0;
  double alpha = 1.2;
  double lambda = 3.0;
  double beta = 1.0;
  double T = 2.0;
  double K = 1.0;
};
double example2_error(const Example2Params& p, int J, Scheme scheme, bool iterative = false);

// fractional Laplacian variant with g = 5 sin(pi x)(cos(2 pi x) - 1), K = 1
double flap_error(double gamma, double alpha, double T, int J);

struct Example3Params {
  double gamma = 0.6;
  double lambda = 1.0;
  double beta = 4.0;
  double T = 1.0;
  double K = 0.0;  // 0 selects 1/pi^2
  std::string source = "piecewise";  // piecewise, chebyshev, exact
  int partitions = 0;                // 0 selects 2^J
  int chebyshev_degree = 16;
  int n1 = 0;
};
struct Example3Run {
  double l2 = 0.0;
  Eigen::VectorXd U;
  double solve_ms = 0.0;
};
Example3Run example3_run(const Example3Params& p, int J, Scheme scheme);
Example3Run example3_l1(const Example3Params& p, int J, int steps, Exec exec = Exec::Parallel);
// time-weight w of the manufactured solution (t^beta + 1) e^{-lambda t} sin(pi x)
double example3_w(const Example3Params& p, double t);

// ---------------------------------------------------------------- harness

struct ExperimentConfig {
  std::string example;
  nlohmann::json params = nlohmann::json::object();
  bool iterative = false;
  std::string scheme;  // empty: from params or the example default
};

const std::vector<std::string>& example_ids();
// validates ids, keys and ranges; throws config-error
void validate_config(const ExperimentConfig& cfg);
ResultTable run_experiment(const ExperimentConfig& cfg);

}  // namespace tfde
