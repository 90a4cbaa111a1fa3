#include "stfem/temporal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stfem {

double TemporalMesh::h_max() const {
  double m = 0.0;
  for (int l = 1; l <= num_elements(); ++l) m = std::max(m, h(l));
  return m;
}

void TemporalMesh::validate() const {
  if (terminal_time <= 0.0) throw std::invalid_argument("temporal mesh: T must be positive");
  if (nodes.size() < 2) throw std::invalid_argument("temporal mesh: needs at least one element");
  if (nodes.front() != 0.0) throw std::invalid_argument("temporal mesh: t_0 must be 0");
  if (nodes.back() != terminal_time)
    throw std::invalid_argument("temporal mesh: t_N must equal T");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("temporal mesh: nodes must be strictly increasing");
  if (uniform) {
    double hmin = std::numeric_limits<double>::max(), hmax = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      hmin = std::min(hmin, nodes[i] - nodes[i - 1]);
      hmax = std::max(hmax, nodes[i] - nodes[i - 1]);
    }
    if (hmax - hmin > 8.0 * std::numeric_limits<double>::epsilon() * terminal_time)
      throw std::invalid_argument("temporal mesh: uniform flag set on a nonuniform mesh");
  }
}

TemporalMesh build_uniform_temporal_mesh(double terminal_time, int alpha) {
  if (terminal_time <= 0.0)
    throw std::invalid_argument("build_uniform_temporal_mesh: T must be positive");
  if (alpha < 0) throw std::invalid_argument("build_uniform_temporal_mesh: alpha must be >= 0");
  const int n = 5 * (1 << alpha);
  TemporalMesh mesh;
  mesh.terminal_time = terminal_time;
  mesh.uniform = true;
  mesh.nodes.resize(n + 1);
  for (int l = 0; l <= n; ++l) mesh.nodes[l] = terminal_time * double(l) / double(n);
  mesh.nodes[0] = 0.0;
  mesh.nodes[n] = terminal_time;
  mesh.validate();
  return mesh;
}

TemporalMesh make_temporal_mesh(double terminal_time, std::vector<double> nodes) {
  TemporalMesh mesh;
  mesh.terminal_time = terminal_time;
  mesh.nodes = std::move(nodes);
  mesh.uniform = false;
  mesh.validate();
  return mesh;
}

std::string to_string(TemporalMatrixKind kind) {
  switch (kind) {
    case TemporalMatrixKind::A1: return "A1";
    case TemporalMatrixKind::M1: return "M1";
    case TemporalMatrixKind::M1_full: return "M1_full";
    case TemporalMatrixKind::M1_hat: return "M1_hat";
    case TemporalMatrixKind::M10: return "M10";
    case TemporalMatrixKind::M0: return "M0";
  }
  return "?";
}

std::string to_string(HilbertKind kind) {
  switch (kind) {
    case HilbertKind::A_HT: return "A_HT";
    case HilbertKind::M_HT: return "M_HT";
    case HilbertKind::M_HT_10: return "M_HT_10";
    case HilbertKind::M_HT_hat: return "M_HT_hat";
  }
  return "?";
}

std::pair<TemporalDofRange, TemporalDofRange> temporal_dof_ranges(const TemporalMesh& mesh,
                                                                  TemporalMatrixKind kind) {
  const int n = mesh.num_elements();
  using B = TemporalBasis;
  switch (kind) {
    case TemporalMatrixKind::A1:
    case TemporalMatrixKind::M1:
      return {{B::hat, 0, n - 1}, {B::hat, 1, n}};
    case TemporalMatrixKind::M1_full:
      return {{B::hat, 0, n}, {B::hat, 0, n}};
    case TemporalMatrixKind::M1_hat:
      return {{B::hat, 0, n - 1}, {B::hat, 0, n}};
    case TemporalMatrixKind::M10:
      return {{B::hat, 0, n - 1}, {B::piecewise_const, 1, n}};
    case TemporalMatrixKind::M0:
      return {{B::piecewise_const, 1, n}, {B::piecewise_const, 1, n}};
  }
  throw std::invalid_argument("temporal_dof_ranges: unknown kind");
}

std::pair<TemporalDofRange, TemporalDofRange> temporal_dof_ranges(const TemporalMesh& mesh,
                                                                  HilbertKind kind) {
  const int n = mesh.num_elements();
  using B = TemporalBasis;
  switch (kind) {
    case HilbertKind::A_HT:
    case HilbertKind::M_HT:
      return {{B::hat, 1, n}, {B::hat, 1, n}};
    case HilbertKind::M_HT_10:
      return {{B::hat, 1, n}, {B::piecewise_const, 1, n}};
    case HilbertKind::M_HT_hat:
      return {{B::hat, 1, n}, {B::hat, 0, n}};
  }
  throw std::invalid_argument("temporal_dof_ranges: unknown kind");
}

namespace {

// (phi'_k, phi'_l) on the full hat index set 0..N.
double stiffness_entry(const TemporalMesh& m, int l, int k) {
  const int n = m.num_elements();
  if (l > k) std::swap(l, k);
  if (k == l) {
    double v = 0.0;
    if (l >= 1) v += 1.0 / m.h(l);
    if (l + 1 <= n) v += 1.0 / m.h(l + 1);
    return v;
  }
  if (k == l + 1) return -1.0 / m.h(k);
  return 0.0;
}

// (phi_k, phi_l) on the full hat index set 0..N.
double mass_entry(const TemporalMesh& m, int l, int k) {
  const int n = m.num_elements();
  if (l > k) std::swap(l, k);
  if (k == l) {
    double v = 0.0;
    if (l >= 1) v += m.h(l) / 3.0;
    if (l + 1 <= n) v += m.h(l + 1) / 3.0;
    return v;
  }
  if (k == l + 1) return m.h(k) / 6.0;
  return 0.0;
}

// (phi0_k, phi1_l): integral of hat phi_l over element tau_k.
double hat_over_element(const TemporalMesh& m, int l, int k) {
  if (k == l || k == l + 1) return m.h(k) / 2.0;
  return 0.0;
}

}  // namespace

TemporalMatrix assemble_temporal(const TemporalMesh& mesh, TemporalMatrixKind kind) {
  mesh.validate();
  auto [rows, cols] = temporal_dof_ranges(mesh, kind);
  TemporalMatrix out;
  out.rows = rows;
  out.cols = cols;
  out.entries = Eigen::MatrixXd::Zero(rows.count(), cols.count());
  for (int i = 0; i < rows.count(); ++i) {
    const int l = rows.first + i;
    for (int j = 0; j < cols.count(); ++j) {
      const int k = cols.first + j;
      double v = 0.0;
      switch (kind) {
        case TemporalMatrixKind::A1: v = stiffness_entry(mesh, l, k); break;
        case TemporalMatrixKind::M1:
        case TemporalMatrixKind::M1_full:
        case TemporalMatrixKind::M1_hat: v = mass_entry(mesh, l, k); break;
        case TemporalMatrixKind::M10: v = hat_over_element(mesh, l, k); break;
        case TemporalMatrixKind::M0: v = (l == k) ? mesh.h(k) : 0.0; break;
      }
      out.entries(i, j) = v;
    }
  }
  return out;
}

}  // namespace stfem
