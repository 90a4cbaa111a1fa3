#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "stfem/mesh.hpp"

namespace stfem {

using SparseMat = Eigen::SparseMatrix<double>;
using VecField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Permittivity/permeability, constant per element.
struct MaterialData {
  std::vector<Eigen::Matrix2d> epsilon;  // symmetric positive definite
  std::vector<double> mu;                // positive

  static MaterialData identity(const TriMesh& mesh);
  static MaterialData constant(const TriMesh& mesh, const Eigen::Matrix2d& eps, double mu);
  void validate(const TriMesh& mesh) const;
};

/// Spatial Galerkin matrices on the FULL spaces (constraint applied separately):
///   curl_curl_N  (mu^-1 curl psi_k, curl psi_l)    Nedelec x Nedelec
///   mass_N       (eps psi_k, psi_l)                Nedelec x Nedelec
///   mass_P0      (psi0_k, psi0_l)                  P0_vec (diagonal)
///   mass_RT      (psiRT_k, psiRT_l)                RT0 x RT0 (unweighted)
///   mixed_N_P0   (psi0_k, psiN_l)                  rows Nedelec, cols P0_vec
///   mixed_N_RT   (psiRT_k, psiN_l)                 rows Nedelec, cols RT0
enum class SpatialMatrixKind { curl_curl_N, mass_N, mass_P0, mass_RT, mixed_N_P0, mixed_N_RT };

/// P0_vec degrees of freedom are numbered 2*element + component.
SparseMat assemble_spatial(const TriMesh& mesh, const MaterialData& mat, SpatialMatrixKind which);

/// Interior-edge DOF indices (zero tangential trace removes boundary edges).
std::vector<int> boundary_constraint(const TriMesh& mesh);

/// Restriction of a full-space matrix to index subsets.
SparseMat restrict_matrix(const SparseMat& full, const std::vector<int>& rows,
                          const std::vector<int>& cols);
Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full, const std::vector<int>& idx);

/// Edge tangential moments int_e field . tau ds (5-point Gauss per edge),
/// oriented by the global low->high edge direction; full edge set.
Eigen::VectorXd nedelec_interpolate(const VecField& field, const TriMesh& mesh);

/// Inverse-inequality constant c_I = h_x^2 lambda_max of
/// curl_curl x = lambda mass x on the full Nedelec space (eps = I, mu = 1),
/// by power iteration to relative tolerance 1e-8.
double estimate_inverse_constant(const TriMesh& mesh, int max_iters = 50000);

/// Per-element geometry and Whitney basis evaluation helper.
struct ElementBasis {
  std::array<Eigen::Vector2d, 3> grad_lambda;
  std::array<double, 3> lambda_offset;  // lambda_i(x) = offset_i + grad_i . x
  std::array<int, 3> edge_ids;
  std::array<std::array<int, 2>, 3> edge_locals;  // local vertex pair (lo, hi) per edge
  double area;

  ElementBasis(const TriMesh& mesh, int tri);
  std::array<double, 3> bary_at(const Eigen::Vector2d& x) const;
  /// Nedelec edge function at barycentric coordinates.
  Eigen::Vector2d nedelec(int local_edge, const std::array<double, 3>& bary) const;
  /// curl of the edge function (constant on the element).
  double nedelec_curl(int local_edge) const;
  /// RT0 function = 90-degree rotation of the Nedelec function.
  Eigen::Vector2d rt0(int local_edge, const std::array<double, 3>& bary) const;
};

}  // namespace stfem
