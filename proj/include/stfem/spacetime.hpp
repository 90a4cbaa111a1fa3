#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "stfem/hilbert.hpp"
#include "stfem/projection.hpp"
#include "stfem/spatial.hpp"
#include "stfem/temporal.hpp"

namespace stfem {

/// Coefficient tensor of A_h, interior Nedelec edges x temporal nodes 1..N^t.
/// Column k is the spatial block at node t_k; stacking columns reproduces the
/// "first in time then in space" flattening.
struct SpaceTimeCoefficients {
  Eigen::MatrixXd values;
};

/// Kronecker-factored space-time operator.
/// GP: -A1 (x) M_N + M1 (x) A_N,  GB: A_HT (x) M_N + M_HT (x) A_N.
struct SpaceTimeOperator {
  Method method = Method::GP;
  Eigen::MatrixXd t_deriv;  // A1 or A_HT (rows = test index, cols = trial k=1..N)
  Eigen::MatrixXd t_mass;   // M1 or M_HT
  SparseMat x_mass;         // constrained (eps psi_k, psi_l)
  SparseMat x_curl;         // constrained (mu^-1 curl psi_k, curl psi_l)
  double deriv_sign = -1.0;
  int nt = 0;
  int nx = 0;
  double hilbert_bound = 0.0;  // certified assembly bound of the H_T factors

  long unknowns() const { return static_cast<long>(nt) * nx; }
};

SpaceTimeOperator assemble_operator(Method method, const TemporalMesh& tmesh,
                                    const TriMesh& xmesh, const MaterialData& mat,
                                    const SeriesTruncation& trunc);

/// Factored matvec: Y = sign * M_N U T_deriv^T + A_N U T_mass^T.
Eigen::MatrixXd apply_operator(const SpaceTimeOperator& op, const Eigen::MatrixXd& u);

/// Assembled sparse form in the "first in time then in space" flattening.
SparseMat assembled_form(const SpaceTimeOperator& op);

struct SolveOptions {
  bool force_iterative = false;
  long direct_unknown_cap = 300000;
  double target_residual = 1e-10;
  int gmres_restart = 80;
  int gmres_max_outer = 200;
};

struct SolveInfo {
  double residual = 0.0;
  bool iterative = false;
  int iterations = 0;
  std::vector<double> history;
};

/// Direct sparse factorization (spatial-major internally) or, above the size
/// cap / on request, restarted GMRES on the factored matvec with a
/// temporal-factor block preconditioner. Residual contract 1e-10 relative.
SpaceTimeCoefficients solve(const SpaceTimeOperator& op, const Eigen::MatrixXd& load,
                            const SolveOptions& opts = {}, SolveInfo* info = nullptr);

/// Forward substitution over temporal blocks; requires the GP lower-two-banded
/// temporal factors. One spatial solve per time step.
SpaceTimeCoefficients march_two_step(const SpaceTimeOperator& op, const Eigen::MatrixXd& load,
                                     SolveInfo* info = nullptr);

struct CflPrediction {
  double ratio = 0.0;       // h_t / h_x
  double cfl_bound = 0.0;   // sqrt(12 / c_I)
  bool predicted_stable = false;
};

/// Strict inequality h_t < sqrt(12/c_I) h_x; requires a uniform temporal mesh.
CflPrediction cfl_check(const TemporalMesh& tmesh, const TriMesh& xmesh, double c_inverse = 18.0);

struct StabilityVerdict {
  enum class Classification { stable, unstable };
  Classification classification = Classification::stable;
  double seminorm_error = 0.0;
  double reference_interpolation_error = 0.0;
  double ratio = 0.0;
  double cfl_bound = 0.0;
};

/// Observed classification: unstable iff the seminorm error exceeds 10x the
/// interpolation error of the same grid.
StabilityVerdict classify_stability(double seminorm_error, double interpolation_error,
                                    const TemporalMesh& tmesh, const TriMesh& xmesh,
                                    double c_inverse = 18.0);

}  // namespace stfem
