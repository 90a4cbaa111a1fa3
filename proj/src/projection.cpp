#include "stfem/projection.hpp"

#include <cmath>
#include <stdexcept>

#include "stfem/common.hpp"
#include "stfem/quadrature.hpp"

namespace stfem {

ProjectedSource project_P0(const SpaceTimeField& j, const TemporalMesh& tmesh,
                           const TriMesh& xmesh, const SourceQuadrature& quad) {
  tmesh.validate();
  xmesh.validate();
  const int nt = tmesh.num_elements();
  const int ntri = xmesh.num_triangles();
  const auto& trule = gauss_rule(quad.temporal_points);

  Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(2 * ntri, nt);
  for (int k = 1; k <= nt; ++k) {
    const double a = tmesh.nodes[k - 1], b = tmesh.nodes[k];
    for (std::size_t q = 0; q < trule.nodes.size(); ++q) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * trule.nodes[q];
      const double wt = 0.5 * (b - a) * trule.weights[q];
      for (int tri = 0; tri < ntri; ++tri) {
        const auto& tv = xmesh.triangles[tri];
        triangle_quadrature(xmesh.vertices[tv[0]], xmesh.vertices[tv[1]], xmesh.vertices[tv[2]],
                            quad.spatial_subdiv, [&](const Eigen::Vector2d& x, double wx) {
                              const Eigen::Vector2d v = j(t, x);
                              moments(2 * tri, k - 1) += wt * wx * v.x();
                              moments(2 * tri + 1, k - 1) += wt * wx * v.y();
                            });
      }
    }
  }

  ProjectedSource out;
  out.kind = ProjectionKind::P0;
  out.J = moments;
  for (int k = 1; k <= nt; ++k)
    for (int tri = 0; tri < ntri; ++tri) {
      const double cell = tmesh.h(k) * xmesh.area(tri);
      out.J(2 * tri, k - 1) /= cell;
      out.J(2 * tri + 1, k - 1) /= cell;
    }
  // normal-equation residual of the (diagonal) Kronecker system
  double num = 0.0, den = 0.0;
  for (int k = 1; k <= nt; ++k)
    for (int tri = 0; tri < ntri; ++tri)
      for (int c = 0; c < 2; ++c) {
        const double lhs = tmesh.h(k) * xmesh.area(tri) * out.J(2 * tri + c, k - 1);
        num += (lhs - moments(2 * tri + c, k - 1)) * (lhs - moments(2 * tri + c, k - 1));
        den += moments(2 * tri + c, k - 1) * moments(2 * tri + c, k - 1);
      }
  out.normal_eq_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

ProjectedSource project_RT1(const SpaceTimeField& j, const TemporalMesh& tmesh,
                            const TriMesh& xmesh, const SourceQuadrature& quad) {
  tmesh.validate();
  xmesh.validate();
  const int nt = tmesh.num_elements();
  const int nedges = xmesh.num_edges();
  const auto& trule = gauss_rule(quad.temporal_points);

  Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(nedges, nt + 1);
  for (int e = 1; e <= nt; ++e) {
    const double a = tmesh.nodes[e - 1], b = tmesh.nodes[e];
    for (std::size_t q = 0; q < trule.nodes.size(); ++q) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * trule.nodes[q];
      const double wt = 0.5 * (b - a) * trule.weights[q];
      const double s = (t - a) / (b - a);  // hat values: (1-s) at node e-1, s at node e
      for (int tri = 0; tri < xmesh.num_triangles(); ++tri) {
        const ElementBasis eb(xmesh, tri);
        const auto& tv = xmesh.triangles[tri];
        triangle_quadrature(xmesh.vertices[tv[0]], xmesh.vertices[tv[1]], xmesh.vertices[tv[2]],
                            quad.spatial_subdiv, [&](const Eigen::Vector2d& x, double wx) {
                              const Eigen::Vector2d v = j(t, x);
                              const auto bary = eb.bary_at(x);
                              for (int le = 0; le < 3; ++le) {
                                const double m = v.dot(eb.rt0(le, bary)) * wt * wx;
                                moments(eb.edge_ids[le], e - 1) += m * (1.0 - s);
                                moments(eb.edge_ids[le], e) += m * s;
                              }
                            });
      }
    }
  }

  const SparseMat mass_rt =
      assemble_spatial(xmesh, MaterialData::identity(xmesh), SpatialMatrixKind::mass_RT);
  Eigen::SimplicialLDLT<SparseMat> xsolve(mass_rt);
  if (xsolve.info() != Eigen::Success)
    throw SolveError("project_RT1: RT mass factorization failed", 0.0);
  const Eigen::MatrixXd mt_full =
      assemble_temporal(tmesh, TemporalMatrixKind::M1_full).entries;
  const Eigen::LDLT<Eigen::MatrixXd> tsolve(mt_full);

  // factor-wise Kronecker solve: J = Mx^-1 H Mt^-1
  Eigen::MatrixXd z = xsolve.solve(moments);
  Eigen::MatrixXd jt = tsolve.solve(z.transpose());

  ProjectedSource out;
  out.kind = ProjectionKind::RT1;
  out.J = jt.transpose();
  const double scale = moments.norm();
  out.normal_eq_residual =
      scale > 0.0 ? (mass_rt * out.J * mt_full - moments).norm() / scale : 0.0;
  if (out.normal_eq_residual > 1e-12)
    throw SolveError("project_RT1: normal equations not solved to contract",
                     out.normal_eq_residual);
  return out;
}

Eigen::MatrixXd build_load(const ProjectedSource& proj, Method method, const TemporalMesh& tmesh,
                           const TriMesh& xmesh, const SeriesTruncation& trunc) {
  tmesh.validate();
  xmesh.validate();
  const int nt = tmesh.num_elements();

  const bool p0 = proj.kind == ProjectionKind::P0;
  const int expect_rows = p0 ? 2 * xmesh.num_triangles() : xmesh.num_edges();
  const int expect_cols = p0 ? nt : nt + 1;
  if (proj.J.rows() != expect_rows || proj.J.cols() != expect_cols)
    throw std::invalid_argument("build_load: projection shape does not match the meshes");

  const SparseMat mixed_full =
      assemble_spatial(xmesh, MaterialData::identity(xmesh),
                       p0 ? SpatialMatrixKind::mixed_N_P0 : SpatialMatrixKind::mixed_N_RT);
  const std::vector<int> interior = boundary_constraint(xmesh);
  std::vector<int> all_cols(mixed_full.cols());
  for (std::size_t i = 0; i < all_cols.size(); ++i) all_cols[i] = static_cast<int>(i);
  const SparseMat mixed = restrict_matrix(mixed_full, interior, all_cols);

  Eigen::MatrixXd temporal;
  if (method == Method::GP)
    temporal = assemble_temporal(tmesh, p0 ? TemporalMatrixKind::M10 : TemporalMatrixKind::M1_hat)
                   .entries;
  else
    temporal =
        assemble_hilbert(tmesh, p0 ? HilbertKind::M_HT_10 : HilbertKind::M_HT_hat, trunc).entries;

  return mixed * (proj.J * temporal.transpose());
}

Eigen::Vector2d eval_projected(const ProjectedSource& proj, const TemporalMesh& tmesh,
                               const TriMesh& xmesh, const PointLocator& loc, double t,
                               const Eigen::Vector2d& x) {
  std::array<double, 3> bary;
  const int tri = loc.locate(x, bary);
  if (tri < 0) throw std::invalid_argument("eval_projected: point outside mesh");
  int k = 1;
  while (k < tmesh.num_elements() && t > tmesh.nodes[k]) ++k;
  if (proj.kind == ProjectionKind::P0)
    return {proj.J(2 * tri, k - 1), proj.J(2 * tri + 1, k - 1)};
  const double s = (t - tmesh.nodes[k - 1]) / tmesh.h(k);
  const ElementBasis eb(xmesh, tri);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int le = 0; le < 3; ++le) {
    const double coef = (1.0 - s) * proj.J(eb.edge_ids[le], k - 1) + s * proj.J(eb.edge_ids[le], k);
    v += coef * eb.rt0(le, bary);
  }
  return v;
}

}  // namespace stfem
