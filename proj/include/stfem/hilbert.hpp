#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "stfem/temporal.hpp"

namespace stfem {

/// Truncation policy for series evaluation of the modified Hilbert transform.
///
/// With acceleration on, assembly subtracts the leading 1/lambda_m^p
/// asymptotics of every series term and sums them in closed form via
/// Clausen-type functions; for piecewise-linear bases the moments coincide
/// with their leading form, so the remainder vanishes and entries are exact
/// to special-function accuracy (~1e-14 relative).
/// With acceleration off, terms are summed directly: fixed_terms sums exactly
/// `terms` of them; tolerance mode stops once a certified tail bound meets
/// `tol` and throws AccuracyError if the cap is hit first.
struct SeriesTruncation {
  enum class Mode { fixed_terms, tolerance };
  Mode mode = Mode::tolerance;
  int terms = 200000;   // fixed_terms: count (>= 16); tolerance: hard cap
  double tol = 1e-10;   // tolerance target, relative, in (0, 1e-6]
  bool acceleration = true;

  void validate() const;
  static SeriesTruncation fixed(int count, bool accel = false) {
    SeriesTruncation t;
    t.mode = Mode::fixed_terms;
    t.terms = count;
    t.acceleration = accel;
    return t;
  }
};

/// Frequencies lambda_k = pi/2 + k*pi, k = 0..count-1.
std::vector<double> ht_frequencies(int count);

/// H_T applied to the continuous piecewise-linear function with the given
/// nodal values, evaluated at t in (0,T).
/// Tolerance mode requires v(0) = 0 (the sine expansion of a function with
/// nonzero initial value converges only in L^2, not pointwise).
double ht_eval_piecewise_linear(const TemporalMesh& mesh, const Eigen::VectorXd& nodal_values,
                                double t, const SeriesTruncation& trunc);

/// Independent oracle: Cauchy principal value integral
///   (H_T f)(t) = v.p. (1/2T) int_0^T [1/sin(pi(s+t)/2T) + 1/sin(pi(s-t)/2T)] f(s) ds
/// with symmetric panel pairing about s = t and geometric refinement.
/// `breakpoints` lists kinks of f so panels never straddle them.
double pv_transform_eval(const std::function<double(double)>& f, double t, double terminal_time,
                         int quad_order, const std::vector<double>& breakpoints = {});

/// Temporal Galerkin matrices involving H_T (see HilbertKind in temporal.hpp).
TemporalMatrix assemble_hilbert(const TemporalMesh& mesh, HilbertKind kind,
                                const SeriesTruncation& trunc);

/// Self-diagnostic: max over a fixed probe set of |(H_T v, w) - (v, H_T^{-1} w)|.
double hilbert_adjoint_residual(const TemporalMesh& mesh, const SeriesTruncation& trunc);

}  // namespace stfem
