#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace stfem {

/// Partition 0 = t_0 < ... < t_{N^t} = T of the time interval.
/// Elements are tau_l = (t_{l-1}, t_l), l = 1..N^t, with sizes h_{t,l}.
struct TemporalMesh {
  double terminal_time = 0.0;
  std::vector<double> nodes;
  bool uniform = false;

  int num_elements() const { return static_cast<int>(nodes.size()) - 1; }
  double h(int l) const { return nodes[l] - nodes[l - 1]; }  // l = 1..N^t
  double h_max() const;
  void validate() const;  // throws std::invalid_argument on a broken invariant
};

/// Uniform mesh with N^t = 5 * 2^alpha elements, t_l = T l / N^t.
TemporalMesh build_uniform_temporal_mesh(double terminal_time, int alpha);

/// General mesh from an explicit node list (nonuniform allowed).
TemporalMesh make_temporal_mesh(double terminal_time, std::vector<double> nodes);

/// Galerkin matrices of the hat/constant bases that do not involve H_T.
///   A1      (phi'_k, phi'_l)   rows l=0..N-1, cols k=1..N
///   M1      (phi_k, phi_l)     rows l=0..N-1, cols k=1..N
///   M1_full (phi_k, phi_l)     rows,cols 0..N
///   M1_hat  (phi_k, phi_l)     rows l=0..N-1, cols k=0..N
///   M10     (phi0_k, phi1_l)   rows l=0..N-1, cols k=1..N
///   M0      (phi0_k, phi0_l)   rows,cols k=1..N (diagonal)
enum class TemporalMatrixKind { A1, M1, M1_full, M1_hat, M10, M0 };

/// Matrices involving the modified Hilbert transformation (assembled in hilbert.cpp).
///   A_HT     (H_T phi'_k, phi'_l)  rows,cols 1..N
///   M_HT     (phi_k, H_T phi_l)    rows,cols 1..N
///   M_HT_10  (phi0_k, H_T phi_l)   rows l=1..N, cols k=1..N
///   M_HT_hat (phi_k, H_T phi_l)    rows l=1..N, cols k=0..N
enum class HilbertKind { A_HT, M_HT, M_HT_10, M_HT_hat };

enum class TemporalBasis { hat, piecewise_const };

/// Contiguous run of basis indices labelling matrix rows or columns.
struct TemporalDofRange {
  TemporalBasis basis = TemporalBasis::hat;
  int first = 0;
  int last = 0;  // inclusive
  int count() const { return last - first + 1; }
  bool operator==(const TemporalDofRange&) const = default;
};

std::string to_string(TemporalMatrixKind kind);
std::string to_string(HilbertKind kind);

/// Dense temporal Galerkin matrix with explicit index labels.
struct TemporalMatrix {
  Eigen::MatrixXd entries;
  TemporalDofRange rows;
  TemporalDofRange cols;
  double certified_bound = 0.0;  // assembly accuracy bound (H_T kinds)
};

/// Row and column labels for a kind on a mesh with N^t elements.
std::pair<TemporalDofRange, TemporalDofRange> temporal_dof_ranges(const TemporalMesh& mesh,
                                                                  TemporalMatrixKind kind);
std::pair<TemporalDofRange, TemporalDofRange> temporal_dof_ranges(const TemporalMesh& mesh,
                                                                  HilbertKind kind);

/// Exact closed-form assembly (piecewise-polynomial integrands, no quadrature).
TemporalMatrix assemble_temporal(const TemporalMesh& mesh, TemporalMatrixKind kind);

}  // namespace stfem
