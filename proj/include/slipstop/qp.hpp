// Copyright 2026 The slipstop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SLIPSTOP_QP_HPP
#define SLIPSTOP_QP_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "slipstop/grasp_model.hpp"
#include "slipstop/nullspace.hpp"

namespace slipstop {

// Relative weights of the three objective terms. All 1 by default: the
// quadratic penalties have compatible units and the variance term carries
// its own 1/N_c normalization, so no extra weighting is needed. Exposed for
// sensitivity studies.
struct ObjectiveWeights {
  double normal_sum = 1.0;
  double tangential = 1.0;
  double variance = 1.0;
};

// Internal-force QP over null-space coefficients. The raw objective,
//
//   maximize  sum_i f_n_i - sum_i ||f_t_i||^2 - (1/N_c) sum_i (f_n_i - mean)^2
//   subject to  tau_min <= J^T f <= tau_max,   f_n_i >= 0,
//
// is rewritten with f = V*lambda, which enforces G*f = 0 by construction
// and removes it as a constraint. Stored here in both forms: the selectors
// and bounds of the original statement plus the assembled lambda-space
// objective (maximize linear.lambda - lambda^T quadratic lambda).
struct QPProblem {
  NullspaceBasis basis;                // V and its diagnostics
  Eigen::MatrixXd jacobian_transpose;  // m x 3N_c
  Eigen::VectorXd tau_min;             // m, N*m
  Eigen::VectorXd tau_max;             // m, N*m
  std::vector<int> normal_selector;    // stacked indices of f_n components
  std::vector<int> tangent_selector;   // stacked indices of f_t components
  int contact_count = 0;

  // Lambda-space form (derived in assemble_qp).
  Eigen::VectorXd linear;        // k
  Eigen::MatrixXd quadratic;     // k x k, positive semidefinite
  Eigen::MatrixXd torque_rows;   // J^T V, m x k
  Eigen::MatrixXd normal_rows;   // S_n V, N_c x k

  int nullity() const { return basis.nullity; }
  int joint_count() const { return static_cast<int>(tau_min.size()); }
  // Inequality count of the original statement: the two-sided torque box
  // plus one nonnegativity row per contact.
  int num_inequalities() const { return 2 * joint_count() + contact_count; }
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations, Unbounded,
                         Degenerate };

const char* to_string(SolveStatus s);

// Normalized internal-force direction plus the diagnostics of the solve
// that produced it. objective_value is recorded before normalization.
struct InternalForceProfile {
  Eigen::VectorXd direction;         // f0*: 3N_c, unit Euclidean norm
  Eigen::VectorXd coefficients;      // basis coefficients of direction
  Eigen::VectorXd raw_coefficients;  // solver's lambda before normalization
  Eigen::VectorXd duals;             // constraint multipliers at the solution
  double objective_value = 0.0;
  double solve_time_s = 0.0;         // wall clock; diagnostics only
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;
  bool polished = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct SolveOptions {
  int max_iter = 10000;
  double tol_primal = 1e-8;  // absolute; relative part fixed at 1e-6
  double tol_dual = 1e-8;
  bool polish = true;
};

// Warm-start state carried between events (previous lambda and duals).
struct WarmStart {
  Eigen::VectorXd lambda;
  Eigen::VectorXd duals;
};

/// Assembles the lambda-space QP from a grasp model, a null-space basis and
/// the torque limits of the chains (J columns follow the chains order used
/// to build the model). Throws TrivialNullspace when the basis is empty and
/// TorqueBoxExcludesZero when some joint's box does not contain zero (the
/// increment problem must keep lambda = 0 feasible; baseline margins are
/// the controller's concern, not the profile's).
QPProblem assemble_qp(const GraspModel& model, const NullspaceBasis& basis,
                      const std::vector<FingerChain>& chains,
                      const ObjectiveWeights& weights = {});

/// Solves the assembled QP to the requested tolerances and returns the
/// normalized profile. Operator-splitting iteration with a direct
/// active-set polish pass; deterministic for fixed inputs and options.
/// A zero optimum (no normal-raising direction in the null space) is
/// reported as Degenerate; divergence of the iterates (possible only when
/// the torque box fails to bound an ascent direction) as Unbounded.
InternalForceProfile solve_internal_qp(
    const QPProblem& problem, const SolveOptions& opts = {},
    const std::optional<WarmStart>& warm = std::nullopt);

/// Structured-text dump of problem dimensions, solution, and per-contact
/// breakdown for offline inspection.
std::string dump_diagnostics(const QPProblem& problem,
                             const InternalForceProfile& profile);

}  // namespace slipstop

#endif  // SLIPSTOP_QP_HPP
