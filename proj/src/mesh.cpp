#include "stfem/mesh.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace stfem {

namespace {

double signed_area2(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Rebuilds edges, incidence, boundary flags and element sizes from
// vertices + triangles.
void derive_topology(TriMesh& m) {
  m.edges.clear();
  m.tri_edges.assign(m.triangles.size(), {});
  m.tri_edge_signs.assign(m.triangles.size(), {});
  m.h_elem.assign(m.triangles.size(), 0.0);

  std::map<std::pair<int, int>, int> edge_id;
  std::vector<int> incidence;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const double a2 = signed_area2(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]);
    if (!(a2 > 0.0))
      throw std::invalid_argument("mesh: triangle " + std::to_string(t) +
                                  " is degenerate or negatively oriented");
    m.h_elem[t] = std::sqrt(0.5 * a2);
    const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (int e = 0; e < 3; ++e) {
      int va = tri[pairs[e][0]], vb = tri[pairs[e][1]];
      const int sign = va < vb ? 1 : -1;
      if (va > vb) std::swap(va, vb);
      auto [it, inserted] = edge_id.try_emplace({va, vb}, static_cast<int>(m.edges.size()));
      if (inserted) {
        m.edges.push_back({va, vb});
        incidence.push_back(0);
      }
      m.tri_edges[t][e] = it->second;
      m.tri_edge_signs[t][e] = sign;
      ++incidence[it->second];
    }
  }
  m.boundary_edge.resize(m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    if (incidence[e] < 1 || incidence[e] > 2)
      throw std::invalid_argument("mesh: edge shared by " + std::to_string(incidence[e]) +
                                  " triangles");
    m.boundary_edge[e] = (incidence[e] == 1);
  }
}

}  // namespace

double TriMesh::area(int tri) const {
  const auto& t = triangles[tri];
  return 0.5 * signed_area2(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
}

double TriMesh::h_max() const {
  double m = 0.0;
  for (double h : h_elem) m = std::max(m, h);
  return m;
}

double TriMesh::h_min() const {
  double m = h_elem.empty() ? 0.0 : h_elem[0];
  for (double h : h_elem) m = std::min(m, h);
  return m;
}

void TriMesh::validate() const {
  if (triangles.empty()) throw std::invalid_argument("mesh: empty");
  for (int t = 0; t < num_triangles(); ++t)
    if (!(area(t) > 0.0)) throw std::invalid_argument("mesh: nonpositive area");
  // interior edges must be traversed in opposite directions by their two triangles
  std::vector<int> sign_sum(edges.size(), 0), count(edges.size(), 0);
  for (int t = 0; t < num_triangles(); ++t)
    for (int e = 0; e < 3; ++e) {
      sign_sum[tri_edges[t][e]] += tri_edge_signs[t][e];
      ++count[tri_edges[t][e]];
    }
  for (int e = 0; e < num_edges(); ++e) {
    if (boundary_edge[e] && count[e] != 1)
      throw std::invalid_argument("mesh: boundary edge with interior incidence");
    if (!boundary_edge[e] && (count[e] != 2 || sign_sum[e] != 0))
      throw std::invalid_argument("mesh: interior edge orientations not opposite");
  }
}

TriMesh build_unit_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_unit_square_mesh: n must be >= 1");
  TriMesh m;
  m.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.emplace_back(double(i) / n, double(j) / n);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  m.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  derive_topology(m);
  return m;
}

TriMesh uniform_refine(const TriMesh& mesh) {
  TriMesh m;
  m.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    auto [it, inserted] = midpoint.try_emplace({a, b}, static_cast<int>(m.vertices.size()));
    if (inserted) m.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    return it->second;
  };
  m.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    m.triangles.push_back({t[0], m01, m20});
    m.triangles.push_back({t[1], m12, m01});
    m.triangles.push_back({t[2], m20, m12});
    m.triangles.push_back({m01, m12, m20});
  }
  derive_topology(m);
  return m;
}

void dump_mesh(const TriMesh& mesh, std::ostream& out) {
  out.precision(17);
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

TriMesh load_mesh(std::istream& in) {
  int nv = 0, nt = 0;
  if (!(in >> nv >> nt) || nv < 3 || nt < 1)
    throw std::invalid_argument("load_mesh: bad header");
  TriMesh m;
  m.vertices.resize(nv);
  for (auto& v : m.vertices)
    if (!(in >> v.x() >> v.y())) throw std::invalid_argument("load_mesh: bad vertex line");
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw std::invalid_argument("load_mesh: bad triangle line");
    for (int v : t)
      if (v < 0 || v >= nv) throw std::invalid_argument("load_mesh: vertex id out of range");
  }
  derive_topology(m);
  return m;
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(mesh) {
  lo_ = mesh.vertices[0];
  hi_ = mesh.vertices[0];
  for (const auto& v : mesh.vertices) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  nbins_ = std::max(1, static_cast<int>(std::sqrt(double(mesh.num_triangles()))));
  bins_.resize(nbins_ * nbins_);
  const Eigen::Vector2d span = (hi_ - lo_).cwiseMax(1e-300);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Eigen::Vector2d tlo = mesh.vertices[mesh.triangles[t][0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(mesh.vertices[mesh.triangles[t][k]]);
      thi = thi.cwiseMax(mesh.vertices[mesh.triangles[t][k]]);
    }
    const int i0 = std::clamp(int((tlo.x() - lo_.x()) / span.x() * nbins_), 0, nbins_ - 1);
    const int i1 = std::clamp(int((thi.x() - lo_.x()) / span.x() * nbins_), 0, nbins_ - 1);
    const int j0 = std::clamp(int((tlo.y() - lo_.y()) / span.y() * nbins_), 0, nbins_ - 1);
    const int j1 = std::clamp(int((thi.y() - lo_.y()) / span.y() * nbins_), 0, nbins_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins_[j * nbins_ + i].push_back(t);
  }
}

int PointLocator::locate(const Eigen::Vector2d& p, std::array<double, 3>& bary) const {
  const Eigen::Vector2d span = (hi_ - lo_).cwiseMax(1e-300);
  const int i = std::clamp(int((p.x() - lo_.x()) / span.x() * nbins_), 0, nbins_ - 1);
  const int j = std::clamp(int((p.y() - lo_.y()) / span.y() * nbins_), 0, nbins_ - 1);
  for (int t : bins_[j * nbins_ + i]) {
    const auto& tri = mesh_.triangles[t];
    const auto &a = mesh_.vertices[tri[0]], &b = mesh_.vertices[tri[1]], &c = mesh_.vertices[tri[2]];
    const double a2 = signed_area2(a, b, c);
    const double l0 = signed_area2(p, b, c) / a2;
    const double l1 = signed_area2(a, p, c) / a2;
    const double l2 = 1.0 - l0 - l1;
    if (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12) {
      bary = {l0, l1, l2};
      return t;
    }
  }
  return -1;
}

}  // namespace stfem
