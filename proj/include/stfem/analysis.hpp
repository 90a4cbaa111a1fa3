#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stfem/manufactured.hpp"
#include "stfem/mesh.hpp"
#include "stfem/spacetime.hpp"
#include "stfem/temporal.hpp"

namespace stfem {

struct ErrorReport {
  double l2_error = 0.0;        // || A - A_h ||_{L2(Q)}
  double seminorm_error = 0.0;  // | A - A_h |_{H^{curl;1}(Q)}
  double h_t = 0.0;
  double h_x = 0.0;
  int nt = 0;
  int nx_interior = 0;
};

struct QuadOrders {
  int temporal = 4;       // Gauss points per time slab
  int spatial_subdiv = 0; // triangle subdivision levels under the 7-pt rule
};

/// Space-time tensor Gauss quadrature of |A-A_h|^2, |dt(A-A_h)|^2 and
/// |curl(A-A_h)|^2; A_h is the piecewise-linear-in-time edge-element field
/// with the given interior-edge coefficients (column k = node t_k).
ErrorReport error_norms(const SpaceTimeCoefficients& coeffs, const ManufacturedProblem& prob,
                        const TemporalMesh& tmesh, const TriMesh& xmesh,
                        const QuadOrders& quad = {});

/// Temporal nodal interpolation composed with the spatial edge interpolant;
/// the t_0 coefficient is dropped (zero initial condition).
SpaceTimeCoefficients interpolate_spacetime(const ManufacturedProblem& prob,
                                            const TemporalMesh& tmesh, const TriMesh& xmesh);

/// |A(t,.) - A_h(t,.)| sampled on a half-pixel-offset lattice for plotting.
struct SliceField {
  int resolution = 0;
  std::vector<double> x, y, magnitude;  // row-major lattice order
};

SliceField slice_difference(const SpaceTimeCoefficients& coeffs, const ManufacturedProblem& prob,
                            const TemporalMesh& tmesh, const TriMesh& xmesh, double t,
                            int resolution = 200);

/// Least-squares slope of log(err) against log(h) (convergence order).
double fit_convergence_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace stfem
