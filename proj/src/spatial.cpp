#include "stfem/spatial.hpp"

#include <cmath>
#include <stdexcept>

#include "stfem/common.hpp"
#include "stfem/quadrature.hpp"

namespace stfem {

MaterialData MaterialData::identity(const TriMesh& mesh) {
  return constant(mesh, Eigen::Matrix2d::Identity(), 1.0);
}

MaterialData MaterialData::constant(const TriMesh& mesh, const Eigen::Matrix2d& eps, double mu) {
  MaterialData m;
  m.epsilon.assign(mesh.num_triangles(), eps);
  m.mu.assign(mesh.num_triangles(), mu);
  return m;
}

void MaterialData::validate(const TriMesh& mesh) const {
  if (static_cast<int>(epsilon.size()) != mesh.num_triangles() ||
      static_cast<int>(mu.size()) != mesh.num_triangles())
    throw std::invalid_argument("MaterialData: per-element size mismatch");
  for (const auto& e : epsilon) {
    const Eigen::Matrix2d sym = 0.5 * (e + e.transpose());
    if (!(sym(0, 0) > 0.0 && sym.determinant() > 0.0))
      throw std::invalid_argument("MaterialData: epsilon not positive definite");
  }
  for (double m : mu)
    if (!(m > 0.0)) throw std::invalid_argument("MaterialData: mu not positive");
}

ElementBasis::ElementBasis(const TriMesh& mesh, int tri) {
  const auto& t = mesh.triangles[tri];
  const auto &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
  const double a2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
  area = 0.5 * a2;
  // grad lambda_i is the inward-scaled normal of the opposite edge
  grad_lambda[0] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / a2;
  grad_lambda[1] = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / a2;
  grad_lambda[2] = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / a2;
  const Eigen::Vector2d ps[3] = {p0, p1, p2};
  for (int i = 0; i < 3; ++i) lambda_offset[i] = (i == 0 ? 1.0 : 0.0) - grad_lambda[i].dot(ps[0]);
  const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int e = 0; e < 3; ++e) {
    edge_ids[e] = mesh.tri_edges[tri][e];
    int la = pairs[e][0], lb = pairs[e][1];
    if (t[la] > t[lb]) std::swap(la, lb);  // global low->high orientation
    edge_locals[e] = {la, lb};
  }
}

std::array<double, 3> ElementBasis::bary_at(const Eigen::Vector2d& x) const {
  return {lambda_offset[0] + grad_lambda[0].dot(x), lambda_offset[1] + grad_lambda[1].dot(x),
          lambda_offset[2] + grad_lambda[2].dot(x)};
}

Eigen::Vector2d ElementBasis::nedelec(int e, const std::array<double, 3>& bary) const {
  const int la = edge_locals[e][0], lb = edge_locals[e][1];
  return bary[la] * grad_lambda[lb] - bary[lb] * grad_lambda[la];
}

double ElementBasis::nedelec_curl(int e) const {
  const int la = edge_locals[e][0], lb = edge_locals[e][1];
  const auto &ga = grad_lambda[la], &gb = grad_lambda[lb];
  return 2.0 * (ga.x() * gb.y() - ga.y() * gb.x());
}

Eigen::Vector2d ElementBasis::rt0(int e, const std::array<double, 3>& bary) const {
  const Eigen::Vector2d v = nedelec(e, bary);
  return {v.y(), -v.x()};
}

namespace {

// Edge-midpoint rule, exact for quadratics.
constexpr std::array<std::array<double, 3>, 3> kMidpoints = {
    {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};

}  // namespace

SparseMat assemble_spatial(const TriMesh& mesh, const MaterialData& mat, SpatialMatrixKind which) {
  mesh.validate();
  mat.validate(mesh);
  const int n_edges = mesh.num_edges();
  const int n_tri = mesh.num_triangles();

  std::vector<Eigen::Triplet<double>> trip;
  int rows = 0, cols = 0;
  switch (which) {
    case SpatialMatrixKind::curl_curl_N:
    case SpatialMatrixKind::mass_N: rows = cols = n_edges; break;
    case SpatialMatrixKind::mass_RT: rows = cols = n_edges; break;
    case SpatialMatrixKind::mass_P0: rows = cols = 2 * n_tri; break;
    case SpatialMatrixKind::mixed_N_P0: rows = n_edges; cols = 2 * n_tri; break;
    case SpatialMatrixKind::mixed_N_RT: rows = n_edges; cols = n_edges; break;
  }
  trip.reserve(9 * n_tri);

  for (int t = 0; t < n_tri; ++t) {
    const ElementBasis eb(mesh, t);
    if (!(eb.area > 0.0))
      throw std::invalid_argument("assemble_spatial: degenerate element " + std::to_string(t));
    switch (which) {
      case SpatialMatrixKind::curl_curl_N: {
        const double w = eb.area / mat.mu[t];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            trip.emplace_back(eb.edge_ids[i], eb.edge_ids[j],
                              w * eb.nedelec_curl(i) * eb.nedelec_curl(j));
        break;
      }
      case SpatialMatrixKind::mass_N: {
        const Eigen::Matrix2d& eps = mat.epsilon[t];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (const auto& bp : kMidpoints)
              acc += eb.nedelec(i, bp).dot(eps * eb.nedelec(j, bp));
            trip.emplace_back(eb.edge_ids[i], eb.edge_ids[j], acc * eb.area / 3.0);
          }
        break;
      }
      case SpatialMatrixKind::mass_RT: {
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (const auto& bp : kMidpoints) acc += eb.rt0(i, bp).dot(eb.rt0(j, bp));
            trip.emplace_back(eb.edge_ids[i], eb.edge_ids[j], acc * eb.area / 3.0);
          }
        break;
      }
      case SpatialMatrixKind::mass_P0: {
        trip.emplace_back(2 * t, 2 * t, eb.area);
        trip.emplace_back(2 * t + 1, 2 * t + 1, eb.area);
        break;
      }
      case SpatialMatrixKind::mixed_N_P0: {
        // integral of the (linear) edge function equals area * centroid value
        const std::array<double, 3> centroid = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        for (int i = 0; i < 3; ++i) {
          const Eigen::Vector2d v = eb.nedelec(i, centroid) * eb.area;
          trip.emplace_back(eb.edge_ids[i], 2 * t, v.x());
          trip.emplace_back(eb.edge_ids[i], 2 * t + 1, v.y());
        }
        break;
      }
      case SpatialMatrixKind::mixed_N_RT: {
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (const auto& bp : kMidpoints) acc += eb.nedelec(i, bp).dot(eb.rt0(j, bp));
            trip.emplace_back(eb.edge_ids[i], eb.edge_ids[j], acc * eb.area / 3.0);
          }
        break;
      }
    }
  }

  SparseMat out(rows, cols);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

std::vector<int> boundary_constraint(const TriMesh& mesh) {
  std::vector<int> interior;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.boundary_edge[e]) interior.push_back(e);
  return interior;
}

SparseMat restrict_matrix(const SparseMat& full, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
  std::vector<int> rmap(full.rows(), -1), cmap(full.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) cmap[cols[j]] = static_cast<int>(j);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < full.outerSize(); ++k)
    for (SparseMat::InnerIterator it(full, k); it; ++it)
      if (rmap[it.row()] >= 0 && cmap[it.col()] >= 0)
        trip.emplace_back(rmap[it.row()], cmap[it.col()], it.value());
  SparseMat out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = full(idx[i]);
  return out;
}

Eigen::VectorXd nedelec_interpolate(const VecField& field, const TriMesh& mesh) {
  const auto& rule = gauss_rule(5);
  Eigen::VectorXd dofs(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Eigen::Vector2d a = mesh.vertices[mesh.edges[e][0]];
    const Eigen::Vector2d b = mesh.vertices[mesh.edges[e][1]];
    const Eigen::Vector2d d = b - a;  // tangent * length
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = 0.5 * (1.0 + rule.nodes[q]);
      acc += 0.5 * rule.weights[q] * field(a + s * d).dot(d);
    }
    dofs(e) = acc;
  }
  return dofs;
}

double estimate_inverse_constant(const TriMesh& mesh, int max_iters) {
  const MaterialData mat = MaterialData::identity(mesh);
  const SparseMat A = assemble_spatial(mesh, mat, SpatialMatrixKind::curl_curl_N);
  const SparseMat M = assemble_spatial(mesh, mat, SpatialMatrixKind::mass_N);
  Eigen::SimplicialLDLT<SparseMat> mass(M);
  if (mass.info() != Eigen::Success)
    throw SolveError("estimate_inverse_constant: mass factorization failed", 0.0);

  Eigen::VectorXd x(mesh.num_edges());
  for (int i = 0; i < x.size(); ++i) x(i) = std::sin(0.7 * i + 0.3) + 0.01;  // deterministic seed
  x /= std::sqrt(x.dot(M * x));
  double lambda = x.dot(A * x);
  int stable = 0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd y = mass.solve(A * x);
    const double nrm = std::sqrt(y.dot(M * y));
    if (!(nrm > 0.0)) break;  // x in the kernel; restart not needed with the seed above
    x = y / nrm;
    const double next = x.dot(A * x);
    if (std::fabs(next - lambda) <= 1e-8 * std::fabs(next)) {
      if (++stable >= 3) {
        lambda = next;
        return mesh.h_max() * mesh.h_max() * lambda;
      }
    } else {
      stable = 0;
    }
    lambda = next;
  }
  throw SolveError("estimate_inverse_constant: power iteration did not converge", lambda);
}

}  // namespace stfem
