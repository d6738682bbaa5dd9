#include "mcslam/solver/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "mcslam/core/error.hpp"

namespace mcslam::solver {

namespace {

struct Layout {
  std::unordered_map<int, int> index;  // variable id -> position in `variables`
  std::vector<int> block;              // position -> block column, -1 when fixed
  int free_count = 0;
};

Layout make_layout(const std::vector<Variable>& variables, std::span<const Factor> factors) {
  Layout layout;
  layout.block.assign(variables.size(), -1);
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (!layout.index.emplace(variables[i].id, static_cast<int>(i)).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate variable id " + std::to_string(variables[i].id));
    }
    if (!variables[i].fixed) layout.block[i] = layout.free_count++;
  }
  for (const auto& f : factors) {
    for (int k = 0; k < f.arity(); ++k) {
      if (!layout.index.contains(f.variables[k])) {
        throw Error(ErrorCode::InvalidArgument, "factor references unknown variable " +
                                                    std::to_string(f.variables[k]));
      }
    }
  }
  return layout;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void check_gauge(const std::vector<Variable>& variables, std::span<const Factor> factors, const Layout& layout) {
  std::vector<int> parent(variables.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<char> anchored(variables.size(), 0);
  std::vector<char> touched(variables.size(), 0);
  for (std::size_t i = 0; i < variables.size(); ++i) anchored[i] = variables[i].fixed;
  for (const auto& f : factors) {
    const int a = layout.index.at(f.variables[0]);
    touched[a] = 1;
    if (f.arity() == 1) {
      anchored[a] = 1;
      continue;
    }
    const int b = layout.index.at(f.variables[1]);
    touched[b] = 1;
    parent[find_root(parent, a)] = find_root(parent, b);
  }
  std::vector<char> root_anchored(variables.size(), 0);
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (anchored[i]) root_anchored[find_root(parent, static_cast<int>(i))] = 1;
  }
  for (std::size_t i = 0; i < variables.size(); ++i) {
    // free variables without any factor never move and need no anchor
    if (touched[i] && !root_anchored[find_root(parent, static_cast<int>(i))]) {
      throw Error(ErrorCode::NoFixedGauge,
                  "variable " + std::to_string(variables[i].id) + " belongs to a component without a fixed gauge");
    }
  }
}

const Pose2& second_pose(const Factor& f, const std::vector<Variable>& vars, const Layout& layout) {
  return f.arity() == 2 ? vars[layout.index.at(f.variables[1])].estimate : vars[layout.index.at(f.variables[0])].estimate;
}

double chi2_of(const std::vector<Variable>& vars, std::span<const Factor> factors, const Layout& layout) {
  double total = 0.0;
  for (const auto& f : factors) {
    const auto e = residual(f, vars[layout.index.at(f.variables[0])].estimate, second_pose(f, vars, layout));
    total += robustify(f.kernel, e.dot(f.information * e)).chi2;
  }
  return total;
}

struct System {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixXd dense;
  Eigen::VectorXd b;
  bool use_dense = true;
};

void accumulate(System& sys, int row_block, int col_block, const Eigen::Matrix3d& m) {
  if (sys.use_dense) {
    sys.dense.block<3, 3>(3 * row_block, 3 * col_block) += m;
    return;
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) sys.triplets.emplace_back(3 * row_block + r, 3 * col_block + c, m(r, c));
  }
}

System build_system(const std::vector<Variable>& vars, std::span<const Factor> factors, const Layout& layout,
                    bool use_dense) {
  const int dim = 3 * layout.free_count;
  System sys;
  sys.use_dense = use_dense;
  sys.b = Eigen::VectorXd::Zero(dim);
  if (use_dense) sys.dense = Eigen::MatrixXd::Zero(dim, dim);

  for (const auto& f : factors) {
    const int pa = layout.index.at(f.variables[0]);
    const auto lin = residual_and_jacobian(f, vars[pa].estimate, second_pose(f, vars, layout));
    const double chi2 = lin.error.dot(f.information * lin.error);
    const double w = robustify(f.kernel, chi2).weight;
    const InformationMatrix omega = w * f.information;

    std::array<int, 2> blocks{layout.block[pa], -1};
    if (f.arity() == 2) blocks[1] = layout.block[layout.index.at(f.variables[1])];

    for (int i = 0; i < f.arity(); ++i) {
      if (blocks[i] < 0) continue;
      const Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 3> jt_omega = lin.jacobians[i].transpose() * omega;
      sys.b.segment<3>(3 * blocks[i]) += jt_omega * lin.error;
      for (int j = 0; j < f.arity(); ++j) {
        if (blocks[j] < 0) continue;
        accumulate(sys, blocks[i], blocks[j], jt_omega * lin.jacobians[j]);
      }
    }
  }
  return sys;
}

std::optional<Eigen::VectorXd> solve_damped(const System& sys, double lambda) {
  const auto n = sys.b.size();
  if (sys.use_dense) {
    Eigen::MatrixXd h = sys.dense;
    h.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd dx = llt.solve(-sys.b);
    if (!dx.allFinite()) return std::nullopt;
    return dx;
  }
  Eigen::SparseMatrix<double> h(n, n);
  auto triplets = sys.triplets;
  for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, lambda);
  h.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt(h);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd dx = llt.solve(-sys.b);
  if (llt.info() != Eigen::Success || !dx.allFinite()) return std::nullopt;
  return dx;
}

}  // namespace

double total_chi2(const std::vector<Variable>& variables, std::span<const Factor> factors) {
  return chi2_of(variables, factors, make_layout(variables, factors));
}

Eigen::MatrixXd system_matrix(const std::vector<Variable>& variables, std::span<const Factor> factors) {
  const auto layout = make_layout(variables, factors);
  return build_system(variables, factors, layout, true).dense;
}

SolverStats solve(std::vector<Variable>& variables, std::span<const Factor> factors, const SolverSettings& settings) {
  const Layout layout = make_layout(variables, factors);
  check_gauge(variables, factors, layout);

  SolverStats stats;
  double chi2 = chi2_of(variables, factors, layout);
  stats.initial_chi2 = chi2;
  if (layout.free_count == 0) {
    stats.converged = true;
    return stats;
  }
  const bool use_dense = layout.free_count <= settings.dense_threshold;
  double lambda = settings.damping;

  for (int it = 0; it < settings.max_iterations; ++it) {
    const System sys = build_system(variables, factors, layout, use_dense);
    bool accepted = false;
    bool factorized_once = false;
    double new_chi2 = chi2;
    for (int retry = 0; retry <= settings.max_damping_retries; ++retry) {
      const auto dx = solve_damped(sys, lambda);
      if (!dx) {
        lambda = std::max(lambda * 10.0, 1e-9);
        continue;
      }
      factorized_once = true;
      std::vector<Variable> candidate = variables;
      for (std::size_t i = 0; i < candidate.size(); ++i) {
        const int blk = layout.block[i];
        if (blk >= 0) candidate[i].estimate = boxplus(candidate[i].estimate, dx->segment<3>(3 * blk));
      }
      new_chi2 = chi2_of(candidate, factors, layout);
      if (new_chi2 <= chi2) {
        variables = std::move(candidate);
        lambda *= 0.5;
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    stats.iterations = it + 1;
    if (!factorized_once) throw Error(ErrorCode::SingularSystem, "system stays singular after damping retries");
    if (!accepted) {
      // no descent direction left at this damping level
      stats.chi2.push_back(chi2);
      stats.converged = true;
      break;
    }
    const double decrease = chi2 - new_chi2;
    chi2 = new_chi2;
    stats.chi2.push_back(chi2);
    if (decrease < settings.chi2_epsilon) {
      stats.converged = true;
      break;
    }
  }
  return stats;
}

}  // namespace mcslam::solver
