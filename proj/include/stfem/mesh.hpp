#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace stfem {

/// Oriented 2D triangle mesh with global edge numbering.
///
/// Edges are oriented low vertex index -> high vertex index, so the sign
/// bookkeeping of curl-conforming assembly is independent of element order.
/// Local mesh sizes follow h_{x,i} = area^{1/2}.
struct TriMesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;       // positively oriented (CCW)
  std::vector<std::array<int, 2>> edges;           // {lo, hi} vertex ids
  std::vector<std::array<int, 3>> tri_edges;       // edge id for local pairs (0,1),(1,2),(2,0)
  std::vector<std::array<int, 3>> tri_edge_signs;  // +1 if traversal runs lo->hi
  std::vector<bool> boundary_edge;
  std::vector<double> h_elem;  // sqrt(area)

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  double area(int tri) const;
  double h_max() const;
  double h_min() const;

  void validate() const;
};

/// n x n squares on the unit square, each split by the diagonal of positive
/// slope: 2n^2 triangles, (n+1)^2 vertices, 3n^2+2n edges, h = (2n^2)^{-1/2}.
TriMesh build_unit_square_mesh(int n);

/// Each triangle split into 4 similar children via edge midpoints.
TriMesh uniform_refine(const TriMesh& mesh);

/// Line-oriented text format: counts header, vertex lines "x y",
/// triangle lines "v0 v1 v2". Derived data is recomputed on load.
void dump_mesh(const TriMesh& mesh, std::ostream& out);
TriMesh load_mesh(std::istream& in);

/// Point-location accelerator (uniform bins).
class PointLocator {
public:
  explicit PointLocator(const TriMesh& mesh);
  /// Triangle containing p, with its barycentric coordinates; -1 if outside.
  int locate(const Eigen::Vector2d& p, std::array<double, 3>& bary) const;

private:
  const TriMesh& mesh_;
  int nbins_;
  Eigen::Vector2d lo_, hi_;
  std::vector<std::vector<int>> bins_;
};

}  // namespace stfem
