#include "stfem/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "stfem/quadrature.hpp"
#include "stfem/spatial.hpp"

namespace stfem {

namespace {

std::vector<int> edge_to_interior_map(const TriMesh& mesh) {
  std::vector<int> map(mesh.num_edges(), -1);
  const auto interior = boundary_constraint(mesh);
  for (std::size_t i = 0; i < interior.size(); ++i) map[interior[i]] = static_cast<int>(i);
  return map;
}

}  // namespace

ErrorReport error_norms(const SpaceTimeCoefficients& coeffs, const ManufacturedProblem& prob,
                        const TemporalMesh& tmesh, const TriMesh& xmesh, const QuadOrders& quad) {
  tmesh.validate();
  xmesh.validate();
  const int nt = tmesh.num_elements();
  const auto e2i = edge_to_interior_map(xmesh);
  const int nx = static_cast<int>(boundary_constraint(xmesh).size());
  if (coeffs.values.rows() != nx || coeffs.values.cols() != nt)
    throw std::invalid_argument("error_norms: coefficient shape does not match the meshes");

  const auto& trule = gauss_rule(quad.temporal);
  double acc_l2 = 0.0, acc_dt = 0.0, acc_curl = 0.0;

  const int ntri = xmesh.num_triangles();
  std::vector<ElementBasis> basis;
  basis.reserve(ntri);
  for (int tri = 0; tri < ntri; ++tri) basis.emplace_back(xmesh, tri);

  for (int l = 1; l <= nt; ++l) {
    const double ta = tmesh.nodes[l - 1], tb = tmesh.nodes[l];
    const double h = tb - ta;
    for (std::size_t q = 0; q < trule.nodes.size(); ++q) {
      const double t = 0.5 * (ta + tb) + 0.5 * h * trule.nodes[q];
      const double wt = 0.5 * h * trule.weights[q];
      const double s = (t - ta) / h;
      for (int tri = 0; tri < ntri; ++tri) {
        const ElementBasis& eb = basis[tri];
        // blend coefficients of the two temporal nodes; node l-1 = 0 for l = 1
        double cblend[3], cdot[3];
        for (int le = 0; le < 3; ++le) {
          const int bc = e2i[eb.edge_ids[le]];
          const double c0 = (bc >= 0 && l >= 2) ? coeffs.values(bc, l - 2) : 0.0;
          const double c1 = bc >= 0 ? coeffs.values(bc, l - 1) : 0.0;
          cblend[le] = (1.0 - s) * c0 + s * c1;
          cdot[le] = (c1 - c0) / h;
        }
        double curl_h = 0.0;
        for (int le = 0; le < 3; ++le) curl_h += cblend[le] * eb.nedelec_curl(le);
        const auto& tv = xmesh.triangles[tri];
        triangle_quadrature(
            xmesh.vertices[tv[0]], xmesh.vertices[tv[1]], xmesh.vertices[tv[2]],
            quad.spatial_subdiv, [&](const Eigen::Vector2d& x, double wx) {
              const auto bary = eb.bary_at(x);
              Eigen::Vector2d ah = Eigen::Vector2d::Zero(), dah = Eigen::Vector2d::Zero();
              for (int le = 0; le < 3; ++le) {
                const Eigen::Vector2d psi = eb.nedelec(le, bary);
                ah += cblend[le] * psi;
                dah += cdot[le] * psi;
              }
              const Eigen::Vector2d de = ah - prob.exact(t, x);
              const Eigen::Vector2d ddt = dah - prob.dt_exact(t, x);
              const double dcurl = curl_h - prob.curl_exact(t, x);
              acc_l2 += wt * wx * de.squaredNorm();
              acc_dt += wt * wx * ddt.squaredNorm();
              acc_curl += wt * wx * dcurl * dcurl;
            });
      }
    }
  }

  ErrorReport rep;
  rep.l2_error = std::sqrt(acc_l2);
  rep.seminorm_error = std::sqrt(acc_dt + acc_curl);
  rep.h_t = tmesh.h_max();
  rep.h_x = xmesh.h_max();
  rep.nt = nt;
  rep.nx_interior = nx;
  return rep;
}

SpaceTimeCoefficients interpolate_spacetime(const ManufacturedProblem& prob,
                                            const TemporalMesh& tmesh, const TriMesh& xmesh) {
  tmesh.validate();
  xmesh.validate();
  const int nt = tmesh.num_elements();
  const auto interior = boundary_constraint(xmesh);
  SpaceTimeCoefficients out;
  out.values.resize(interior.size(), nt);
  for (int k = 1; k <= nt; ++k) {
    const double t = tmesh.nodes[k];
    const Eigen::VectorXd full = nedelec_interpolate(
        [&](const Eigen::Vector2d& x) { return prob.exact(t, x); }, xmesh);
    out.values.col(k - 1) = restrict_vector(full, interior);
  }
  return out;
}

SliceField slice_difference(const SpaceTimeCoefficients& coeffs, const ManufacturedProblem& prob,
                            const TemporalMesh& tmesh, const TriMesh& xmesh, double t,
                            int resolution) {
  tmesh.validate();
  xmesh.validate();
  const int nt = tmesh.num_elements();
  if (!(t >= 0.0 && t <= tmesh.terminal_time))
    throw std::invalid_argument("slice_difference: t outside [0,T]");
  const auto e2i = edge_to_interior_map(xmesh);

  int l = 1;
  while (l < nt && t > tmesh.nodes[l]) ++l;
  const double s = (t - tmesh.nodes[l - 1]) / tmesh.h(l);

  Eigen::Vector2d lo = xmesh.vertices[0], hi = xmesh.vertices[0];
  for (const auto& v : xmesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const PointLocator locator(xmesh);

  SliceField field;
  field.resolution = resolution;
  field.x.reserve(static_cast<std::size_t>(resolution) * resolution);
  field.y.reserve(field.x.capacity());
  field.magnitude.reserve(field.x.capacity());
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      const Eigen::Vector2d p(lo.x() + (hi.x() - lo.x()) * (i + 0.5) / resolution,
                              lo.y() + (hi.y() - lo.y()) * (j + 0.5) / resolution);
      std::array<double, 3> bary;
      const int tri = locator.locate(p, bary);
      Eigen::Vector2d ah = Eigen::Vector2d::Zero();
      if (tri >= 0) {
        const ElementBasis eb(xmesh, tri);
        for (int le = 0; le < 3; ++le) {
          const int bc = e2i[eb.edge_ids[le]];
          const double c0 = (bc >= 0 && l >= 2) ? coeffs.values(bc, l - 2) : 0.0;
          const double c1 = bc >= 0 ? coeffs.values(bc, l - 1) : 0.0;
          ah += ((1.0 - s) * c0 + s * c1) * eb.nedelec(le, bary);
        }
      }
      field.x.push_back(p.x());
      field.y.push_back(p.y());
      field.magnitude.push_back((prob.exact(t, p) - ah).norm());
    }
  return field;
}

double fit_convergence_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2)
    throw std::invalid_argument("fit_convergence_order: need matching samples");
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace stfem
