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

#include "slipstop/nullspace.hpp"

#include <cmath>

#include "slipstop/errors.hpp"

namespace slipstop {

namespace {

void fix_column_signs(Eigen::MatrixXd& v) {
  for (int c = 0; c < v.cols(); ++c) {
    for (int r = 0; r < v.rows(); ++r) {
      const double e = v(r, c);
      if (std::abs(e) > 1e-12) {
        if (e < 0.0) v.col(c) = -v.col(c);
        break;
      }
    }
  }
}

}  // namespace

NullspaceBasis kernel_basis(const Eigen::MatrixXd& a, double tol) {
  if (!a.allFinite()) {
    throw DegenerateInput("matrix contains non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = tol * sigma_max;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  NullspaceBasis out;
  out.rank = rank;
  out.nullity = static_cast<int>(a.cols()) - rank;
  out.tolerance_used = cutoff;
  out.basis = svd.matrixV().rightCols(out.nullity);
  fix_column_signs(out.basis);
  return out;
}

NullspaceBasis nullspace_basis(const Eigen::MatrixXd& grasp_matrix,
                               double tol) {
  if (grasp_matrix.rows() != 6) {
    throw DegenerateInput("grasp matrix must have exactly 6 rows");
  }
  return kernel_basis(grasp_matrix, tol);
}

GraspClass classify_grasp(const Eigen::MatrixXd& grasp_matrix,
                          const Eigen::MatrixXd& hand_jacobian,
                          double tol) {
  if (hand_jacobian.rows() != grasp_matrix.cols()) {
    throw DimensionMismatch("hand Jacobian must have 3N_c rows to match G");
  }
  const NullspaceBasis ng = nullspace_basis(grasp_matrix, tol);
  const NullspaceBasis njt = kernel_basis(hand_jacobian.transpose(), tol);

  GraspClass cls;
  cls.graspable = ng.nullity > 0;
  cls.defective = njt.nullity > 0;

  // dim(N(G) ∩ N(J^T)) = k1 + k2 - rank([V_G  V_Jt]); both bases are
  // orthonormal, so rank deficiency of the stack is exactly the overlap.
  if (cls.graspable && cls.defective) {
    Eigen::MatrixXd stacked(ng.ambient_dim(), ng.nullity + njt.nullity);
    stacked.leftCols(ng.nullity) = ng.basis;
    stacked.rightCols(njt.nullity) = njt.basis;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    const auto& sv = svd.singularValues();
    const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);
    int stack_rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) ++stack_rank;
    }
    cls.hyperstatic = (ng.nullity + njt.nullity - stack_rank) > 0;
  }
  cls.rsc_applicable = cls.graspable && !cls.hyperstatic;
  return cls;
}

}  // namespace slipstop
