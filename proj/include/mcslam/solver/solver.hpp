#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "mcslam/solver/factor.hpp"

namespace mcslam::solver {

struct Variable {
  int id = 0;
  Pose2 estimate;
  bool fixed = false;
};

struct SolverSettings {
  int max_iterations = 20;
  double damping = 1e-4;  // initial lambda of the additive lambda*I term
  double chi2_epsilon = 1e-12;
  int dense_threshold = 300;  // free variables; sparse Cholesky above
  int max_damping_retries = 10;
};

struct SolverStats {
  double initial_chi2 = 0.0;
  std::vector<double> chi2;  // one entry per iteration, after the step
  int iterations = 0;
  bool converged = false;

  friend bool operator==(const SolverStats&, const SolverStats&) = default;
};

/// Damped Gauss-Newton over Pose2 variables.
///
/// Each iteration linearizes all factors at the current estimate, solves
/// (H + lambda I) dx = -b over the free variables and applies dx with the left
/// boxplus. A step that raises the (robustified) chi2 is rejected and lambda
/// grows x10; an accepted step halves lambda. Stops at max_iterations or when
/// the accepted chi2 decrease drops below chi2_epsilon.
///
/// Throws NoFixedGauge when a connected component has neither a fixed
/// variable nor a unary factor, SingularSystem when no damping retry yields a
/// factorizable system, InvalidArgument for factors naming unknown ids.
SolverStats solve(std::vector<Variable>& variables, std::span<const Factor> factors,
                  const SolverSettings& settings = {});

/// Sum of robustified chi2 over all factors at the current estimates.
double total_chi2(const std::vector<Variable>& variables, std::span<const Factor> factors);

/// Undamped H = sum J^T W J over the free variables at the current estimates
/// (robust weights included). Ordered like the free variables in `variables`.
Eigen::MatrixXd system_matrix(const std::vector<Variable>& variables, std::span<const Factor> factors);

}  // namespace mcslam::solver
