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

#include "slipstop/qp.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "slipstop/errors.hpp"

namespace slipstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Operator-splitting parameters. Fixed (no adaptive rho) so identical
// inputs give bitwise-identical iterates.
constexpr double kSigma = 1e-6;
constexpr double kRho = 0.1;
constexpr double kRelax = 1.6;
constexpr double kRelTol = 1e-6;
constexpr double kDivergenceNorm = 1e10;
constexpr int kCheckEvery = 10;

struct SplitState {
  Eigen::VectorXd x;  // lambda iterate
  Eigen::VectorXd z;  // constraint-space iterate
  Eigen::VectorXd y;  // duals
};

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// KKT solve for the equality-constrained polish problem
//   min 1/2 x^T P x + q^T x  s.t.  A_act x = b,
// using a lightly regularized factorization plus iterative refinement
// against the exact KKT operator.
bool solve_polish_kkt(const Eigen::MatrixXd& p, const Eigen::VectorXd& q,
                      const Eigen::MatrixXd& a_act, const Eigen::VectorXd& b,
                      Eigen::VectorXd* x_out, Eigen::VectorXd* nu_out) {
  const int k = static_cast<int>(p.rows());
  const int na = static_cast<int>(a_act.rows());
  const double delta = 1e-9;

  Eigen::MatrixXd kkt_reg = Eigen::MatrixXd::Zero(k + na, k + na);
  kkt_reg.topLeftCorner(k, k) = p + delta * Eigen::MatrixXd::Identity(k, k);
  kkt_reg.topRightCorner(k, na) = a_act.transpose();
  kkt_reg.bottomLeftCorner(na, k) = a_act;
  kkt_reg.bottomRightCorner(na, na) =
      -delta * Eigen::MatrixXd::Identity(na, na);

  Eigen::MatrixXd kkt = kkt_reg;
  kkt.topLeftCorner(k, k) = p;
  kkt.bottomRightCorner(na, na).setZero();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt_reg);
  if (!lu.isInvertible()) return false;

  Eigen::VectorXd rhs(k + na);
  rhs.head(k) = -q;
  rhs.tail(na) = b;
  Eigen::VectorXd sol = lu.solve(rhs);
  for (int refine = 0; refine < 3; ++refine) {
    sol += lu.solve(rhs - kkt * sol);
  }
  if (!sol.allFinite()) return false;
  *x_out = sol.head(k);
  *nu_out = sol.tail(na);
  return true;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

QPProblem assemble_qp(const GraspModel& model, const NullspaceBasis& basis,
                      const std::vector<FingerChain>& chains,
                      const ObjectiveWeights& weights) {
  if (basis.nullity < 1) {
    throw TrivialNullspace(
        "grasp has no internal-force subspace; gate via classify_grasp");
  }
  const int nc = model.contact_count();
  const int k = basis.nullity;
  if (basis.ambient_dim() != 3 * nc) {
    throw DimensionMismatch("basis rows do not match 3*N_c");
  }

  QPProblem p;
  p.basis = basis;
  p.jacobian_transpose = model.hand_jacobian.transpose();
  p.contact_count = nc;

  int m = 0;
  for (const auto& ch : chains) m += ch.joint_count();
  if (m != model.joint_count()) {
    throw DimensionMismatch("chains do not match the model's joint count");
  }
  p.tau_min.resize(m);
  p.tau_max.resize(m);
  int j = 0;
  for (const auto& ch : chains) {
    for (const auto& joint : ch.joints) {
      p.tau_min[j] = joint.tau_min;
      p.tau_max[j] = joint.tau_max;
      if (!(joint.tau_min <= 0.0 && 0.0 <= joint.tau_max)) {
        throw TorqueBoxExcludesZero(
            "torque box must contain zero so lambda = 0 stays feasible");
      }
      ++j;
    }
  }

  for (int i = 0; i < nc; ++i) {
    p.normal_selector.push_back(3 * i);
    p.tangent_selector.push_back(3 * i + 1);
    p.tangent_selector.push_back(3 * i + 2);
  }

  const Eigen::MatrixXd& v = basis.basis;
  p.normal_rows.resize(nc, k);
  for (int i = 0; i < nc; ++i) p.normal_rows.row(i) = v.row(3 * i);
  Eigen::MatrixXd tangent_rows(2 * nc, k);
  for (int i = 0; i < nc; ++i) {
    tangent_rows.row(2 * i) = v.row(3 * i + 1);
    tangent_rows.row(2 * i + 1) = v.row(3 * i + 2);
  }
  p.torque_rows = p.jacobian_transpose * v;

  p.linear = weights.normal_sum *
             (p.normal_rows.transpose() * Eigen::VectorXd::Ones(nc));
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(nc, nc) -
      Eigen::MatrixXd::Constant(nc, nc, 1.0 / nc);
  const Eigen::MatrixXd centered_normals = centering * p.normal_rows;
  p.quadratic =
      weights.tangential * tangent_rows.transpose() * tangent_rows +
      (weights.variance / nc) * centered_normals.transpose() *
          centered_normals;
  return p;
}

InternalForceProfile solve_internal_qp(const QPProblem& problem,
                                       const SolveOptions& opts,
                                       const std::optional<WarmStart>& warm) {
  const auto t0 = std::chrono::steady_clock::now();
  const int k = problem.nullity();
  const int m = problem.joint_count();
  const int nc = problem.contact_count;
  const int rows = m + nc;

  // Minimization form of the negated objective.
  const Eigen::MatrixXd p_mat = 2.0 * problem.quadratic;
  const Eigen::VectorXd q_vec = -problem.linear;
  Eigen::MatrixXd a_mat(rows, k);
  a_mat.topRows(m) = problem.torque_rows;
  a_mat.bottomRows(nc) = problem.normal_rows;
  Eigen::VectorXd lower(rows), upper(rows);
  lower.head(m) = problem.tau_min;
  upper.head(m) = problem.tau_max;
  lower.tail(nc).setZero();
  upper.tail(nc).setConstant(kInf);

  SplitState s;
  s.x = (warm && warm->lambda.size() == k) ? warm->lambda
                                           : Eigen::VectorXd::Zero(k);
  s.y = (warm && warm->duals.size() == rows) ? warm->duals
                                             : Eigen::VectorXd::Zero(rows);
  s.z = (a_mat * s.x).cwiseMax(lower).cwiseMin(upper);

  const Eigen::MatrixXd kkt =
      p_mat + kSigma * Eigen::MatrixXd::Identity(k, k) +
      kRho * a_mat.transpose() * a_mat;
  const Eigen::LDLT<Eigen::MatrixXd> kkt_ldlt(kkt);

  InternalForceProfile out;
  out.status = SolveStatus::MaxIterations;

  auto residuals = [&](const SplitState& st, double* rp, double* rd) {
    *rp = inf_norm(a_mat * st.x - st.z);
    *rd = inf_norm(p_mat * st.x + q_vec + a_mat.transpose() * st.y);
  };

  Eigen::VectorXd y_prev_check = s.y;
  Eigen::VectorXd x_prev_check = s.x;

  int it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd rhs =
        kSigma * s.x - q_vec + a_mat.transpose() * (kRho * s.z - s.y);
    const Eigen::VectorXd x_tilde = kkt_ldlt.solve(rhs);
    const Eigen::VectorXd z_tilde = a_mat * x_tilde;
    const Eigen::VectorXd z_mix = kRelax * z_tilde + (1.0 - kRelax) * s.z;
    s.x = kRelax * x_tilde + (1.0 - kRelax) * s.x;
    const Eigen::VectorXd z_new =
        (z_mix + s.y / kRho).cwiseMax(lower).cwiseMin(upper);
    s.y += kRho * (z_mix - z_new);
    s.z = z_new;

    if (it % kCheckEvery == 0 || it == opts.max_iter) {
      if (inf_norm(s.x) > kDivergenceNorm) {
        out.status = SolveStatus::Unbounded;
        break;
      }
      double rp, rd;
      residuals(s, &rp, &rd);
      const double eps_p =
          opts.tol_primal +
          kRelTol * std::max(inf_norm(a_mat * s.x), inf_norm(s.z));
      const double eps_d =
          opts.tol_dual +
          kRelTol * std::max({inf_norm(p_mat * s.x),
                              inf_norm(a_mat.transpose() * s.y),
                              inf_norm(q_vec)});
      if (rp <= eps_p && rd <= eps_d) {
        out.status = SolveStatus::Optimal;
        break;
      }

      // Primal infeasibility certificate: a dual direction dy with
      // A^T dy = 0 whose support function u'[dy]_+ + l'[dy]_- is negative
      // proves the constraint set empty. Rows with an infinite bound can
      // only certify through the other side.
      const Eigen::VectorXd dy = s.y - y_prev_check;
      const double dy_inf = inf_norm(dy);
      if (dy_inf > 1e-10) {
        const double cert_tol = 1e-8 * dy_inf;
        bool certificate = inf_norm(a_mat.transpose() * dy) <= cert_tol;
        double support = 0.0;
        for (int i = 0; i < rows && certificate; ++i) {
          if (dy[i] > cert_tol && !std::isfinite(upper[i])) {
            certificate = false;
          } else if (dy[i] < -cert_tol && !std::isfinite(lower[i])) {
            certificate = false;
          } else if (dy[i] > 0.0 && std::isfinite(upper[i])) {
            support += upper[i] * dy[i];
          } else if (dy[i] < 0.0 && std::isfinite(lower[i])) {
            support += lower[i] * dy[i];
          }
        }
        if (certificate && support < -cert_tol) {
          out.status = SolveStatus::Infeasible;
          break;
        }
      }
      y_prev_check = s.y;

      // Dual infeasibility certificate: a primal ray dx along which the
      // objective descends forever while every finite bound stays
      // respected in the limit.
      const Eigen::VectorXd dx = s.x - x_prev_check;
      const double dx_inf = inf_norm(dx);
      if (dx_inf > 1e-10) {
        const double ray_tol = 1e-8 * dx_inf;
        bool ray = inf_norm(p_mat * dx) <= ray_tol &&
                   q_vec.dot(dx) < -ray_tol;
        if (ray) {
          const Eigen::VectorXd adx = a_mat * dx;
          for (int i = 0; i < rows && ray; ++i) {
            if (std::isfinite(upper[i]) && adx[i] > ray_tol) ray = false;
            if (std::isfinite(lower[i]) && adx[i] < -ray_tol) ray = false;
          }
        }
        if (ray) {
          out.status = SolveStatus::Unbounded;
          break;
        }
      }
      x_prev_check = s.x;
    }
  }
  out.iterations = std::min(it, opts.max_iter);
  residuals(s, &out.primal_residual, &out.dual_residual);

  // Active-set polish: duals identify the binding rows; re-solving the
  // equality-constrained problem sharpens the iterate to near machine
  // precision when the guess is right.
  if (opts.polish && out.status != SolveStatus::Unbounded &&
      out.status != SolveStatus::Infeasible) {
    std::vector<int> active;
    std::vector<double> bval;
    for (int i = 0; i < rows; ++i) {
      if (s.y[i] < -1e-12 && std::isfinite(lower[i])) {
        active.push_back(i);
        bval.push_back(lower[i]);
      } else if (s.y[i] > 1e-12 && std::isfinite(upper[i])) {
        active.push_back(i);
        bval.push_back(upper[i]);
      }
    }
    Eigen::MatrixXd a_act(static_cast<int>(active.size()), k);
    Eigen::VectorXd b_act(static_cast<int>(active.size()));
    for (size_t i = 0; i < active.size(); ++i) {
      a_act.row(static_cast<int>(i)) = a_mat.row(active[i]);
      b_act[static_cast<int>(i)] = bval[i];
    }
    Eigen::VectorXd x_pol, nu;
    if (solve_polish_kkt(p_mat, q_vec, a_act, b_act, &x_pol, &nu)) {
      Eigen::VectorXd y_pol = Eigen::VectorXd::Zero(rows);
      for (size_t i = 0; i < active.size(); ++i) {
        y_pol[active[i]] = nu[static_cast<int>(i)];
      }
      const Eigen::VectorXd ax = a_mat * x_pol;
      const double feas_tol = 1e-9;
      bool feasible = true;
      for (int i = 0; i < rows; ++i) {
        const double slack_tol =
            feas_tol * std::max({1.0, std::abs(lower[i]) == kInf ? 0.0
                                          : std::abs(lower[i]),
                                 std::abs(upper[i]) == kInf ? 0.0
                                          : std::abs(upper[i])});
        if (ax[i] < lower[i] - slack_tol || ax[i] > upper[i] + slack_tol) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        const double rp_pol = 0.0;  // equality rows hold by construction
        const double rd_pol =
            inf_norm(p_mat * x_pol + q_vec + a_mat.transpose() * y_pol);
        if (rd_pol <= std::max(out.dual_residual, opts.tol_dual) + 1e-15) {
          s.x = x_pol;
          s.y = y_pol;
          s.z = ax;
          out.polished = true;
          out.primal_residual = rp_pol;
          out.dual_residual = rd_pol;
          if (out.status == SolveStatus::MaxIterations &&
              rd_pol <= opts.tol_dual) {
            out.status = SolveStatus::Optimal;
          }
        }
      }
    }
  }

  out.raw_coefficients = s.x;
  out.duals = s.y;
  out.objective_value =
      problem.linear.dot(s.x) - s.x.dot(problem.quadratic * s.x);

  const double norm = s.x.norm();  // V is orthonormal: ||V x|| = ||x||
  if (norm <= 1e-12 || !std::isfinite(norm)) {
    if (out.status == SolveStatus::Optimal) {
      out.status = SolveStatus::Degenerate;
    }
    out.coefficients = Eigen::VectorXd::Zero(k);
    out.direction = Eigen::VectorXd::Zero(3 * nc);
  } else {
    out.coefficients = s.x / norm;
    out.direction = problem.basis.basis * out.coefficients;
  }

  out.solve_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

std::string dump_diagnostics(const QPProblem& problem,
                             const InternalForceProfile& profile) {
  std::ostringstream os;
  os << "internal-force qp"
     << "\n  contacts: " << problem.contact_count
     << "\n  joints: " << problem.joint_count()
     << "\n  nullity: " << problem.nullity()
     << " (rank " << problem.basis.rank << ", sv cutoff "
     << problem.basis.tolerance_used << ")"
     << "\n  inequalities: " << problem.num_inequalities()
     << "\n  status: " << to_string(profile.status)
     << "\n  iterations: " << profile.iterations
     << (profile.polished ? " (polished)" : "")
     << "\n  residuals: primal " << profile.primal_residual << ", dual "
     << profile.dual_residual
     << "\n  objective (pre-normalization): " << profile.objective_value
     << "\n  solve time: " << profile.solve_time_s * 1e3 << " ms\n";
  if (profile.direction.size() == 3 * problem.contact_count) {
    for (int i = 0; i < problem.contact_count; ++i) {
      const double fn = profile.direction[3 * i];
      const double ft = std::hypot(profile.direction[3 * i + 1],
                                   profile.direction[3 * i + 2]);
      os << "  contact " << i << ": normal " << fn << ", tangential " << ft
         << "\n";
    }
    const Eigen::VectorXd tau =
        problem.jacobian_transpose * profile.direction;
    os << "  torque per unit alpha:";
    for (int j = 0; j < tau.size(); ++j) os << ' ' << tau[j];
    os << "\n";
  }
  return os.str();
}

}  // namespace slipstop
