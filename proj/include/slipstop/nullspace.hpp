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

#ifndef SLIPSTOP_NULLSPACE_HPP
#define SLIPSTOP_NULLSPACE_HPP

#include <Eigen/Dense>

namespace slipstop {

// Default relative singular-value cutoff for rank decisions. Contact
// geometry from the simulated pressure arrays is quantized at the
// sub-millimeter level, so near-singular directions below this scale are
// noise, not structure.
inline constexpr double kRankTolerance = 1e-10;

// Orthonormal basis of the internal-force subspace N(G).
struct NullspaceBasis {
  Eigen::MatrixXd basis;      // 3N_c x k, orthonormal columns
  int nullity = 0;            // k
  int rank = 0;               // numerical rank of G
  double tolerance_used = 0;  // absolute singular-value cutoff applied

  int ambient_dim() const { return static_cast<int>(basis.rows()); }
};

// Kernel-based applicability verdict for internal-force control.
struct GraspClass {
  bool graspable = false;    // N(G) nontrivial
  bool defective = false;    // N(J^T) nontrivial
  bool hyperstatic = false;  // N(G) and N(J^T) intersect nontrivially
  bool rsc_applicable = false;  // graspable and not hyperstatic
};

/// Orthonormal null-space basis of a 6 x 3N_c grasp matrix via SVD. Rank
/// counts singular values above tol*sigma_max. Column signs are fixed so
/// the first nonzero entry of each basis vector is positive, making
/// downstream profiles reproducible run to run. Throws DegenerateInput on
/// non-finite entries.
NullspaceBasis nullspace_basis(const Eigen::MatrixXd& grasp_matrix,
                               double tol = kRankTolerance);

/// Null space of an arbitrary matrix's columns (kernel of A), same
/// conventions as nullspace_basis. Used for N(J^T).
NullspaceBasis kernel_basis(const Eigen::MatrixXd& a,
                            double tol = kRankTolerance);

/// Classifies the grasp from G and J: graspable (N(G) != {0}), defective
/// (N(J^T) != {0}), hyperstatic (nontrivial intersection, computed from the
/// rank of the stacked orthonormal bases), and the applicability verdict.
GraspClass classify_grasp(const Eigen::MatrixXd& grasp_matrix,
                          const Eigen::MatrixXd& hand_jacobian,
                          double tol = kRankTolerance);

}  // namespace slipstop

#endif  // SLIPSTOP_NULLSPACE_HPP
