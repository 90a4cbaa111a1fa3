#pragma once

#include <Eigen/Dense>
#include <functional>

#include "stfem/hilbert.hpp"
#include "stfem/spatial.hpp"
#include "stfem/temporal.hpp"

namespace stfem {

using SpaceTimeField = std::function<Eigen::Vector2d(double, const Eigen::Vector2d&)>;

enum class ProjectionKind { P0, RT1 };
enum class Method { GP, GB };

/// L2(Q)-projected source: coefficients J indexed spatial x temporal.
/// P0:  N_x^0 x N^t (piecewise constant in t and x)
/// RT1: N_x^RT x (N^t+1) (linear in time, RT0 in space)
struct ProjectedSource {
  ProjectionKind kind = ProjectionKind::P0;
  Eigen::MatrixXd J;
  double normal_eq_residual = 0.0;
};

struct SourceQuadrature {
  int temporal_points = 4;  // Gauss points per temporal element
  int spatial_subdiv = 0;   // levels of triangle subdivision under the 7-pt rule
};

ProjectedSource project_P0(const SpaceTimeField& j, const TemporalMesh& tmesh,
                           const TriMesh& xmesh, const SourceQuadrature& quad = {});
ProjectedSource project_RT1(const SpaceTimeField& j, const TemporalMesh& tmesh,
                            const TriMesh& xmesh, const SourceQuadrature& quad = {});

/// Load matrix F (interior Nedelec edges x N^t): the triple product of the
/// mixed spatial mass, the coefficients J, and the method's temporal factor.
/// GP columns carry test indices l = 0..N^t-1, GB columns l = 1..N^t.
Eigen::MatrixXd build_load(const ProjectedSource& proj, Method method, const TemporalMesh& tmesh,
                           const TriMesh& xmesh, const SeriesTruncation& trunc);

/// Evaluate the projected source as a space-time field (debug/oracle use).
Eigen::Vector2d eval_projected(const ProjectedSource& proj, const TemporalMesh& tmesh,
                               const TriMesh& xmesh, const PointLocator& loc, double t,
                               const Eigen::Vector2d& x);

}  // namespace stfem
