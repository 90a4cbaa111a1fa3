#include "stfem/spacetime.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "stfem/common.hpp"

namespace stfem {

SpaceTimeOperator assemble_operator(Method method, const TemporalMesh& tmesh,
                                    const TriMesh& xmesh, const MaterialData& mat,
                                    const SeriesTruncation& trunc) {
  tmesh.validate();
  xmesh.validate();
  SpaceTimeOperator op;
  op.method = method;
  op.nt = tmesh.num_elements();
  if (method == Method::GP) {
    op.t_deriv = assemble_temporal(tmesh, TemporalMatrixKind::A1).entries;
    op.t_mass = assemble_temporal(tmesh, TemporalMatrixKind::M1).entries;
    op.deriv_sign = -1.0;
  } else {
    const TemporalMatrix a = assemble_hilbert(tmesh, HilbertKind::A_HT, trunc);
    const TemporalMatrix m = assemble_hilbert(tmesh, HilbertKind::M_HT, trunc);
    op.t_deriv = a.entries;
    op.t_mass = m.entries;
    op.deriv_sign = 1.0;
    op.hilbert_bound = std::max(a.certified_bound, m.certified_bound);
  }
  const std::vector<int> interior = boundary_constraint(xmesh);
  op.x_mass = restrict_matrix(assemble_spatial(xmesh, mat, SpatialMatrixKind::mass_N), interior,
                              interior);
  op.x_curl = restrict_matrix(assemble_spatial(xmesh, mat, SpatialMatrixKind::curl_curl_N),
                              interior, interior);
  op.nx = static_cast<int>(interior.size());
  return op;
}

Eigen::MatrixXd apply_operator(const SpaceTimeOperator& op, const Eigen::MatrixXd& u) {
  return op.deriv_sign * (op.x_mass * u) * op.t_deriv.transpose() +
         (op.x_curl * u) * op.t_mass.transpose();
}

namespace {

// Per-row union pattern of the two spatial factors with both values.
struct SpatialRows {
  std::vector<std::vector<std::pair<int, std::pair<double, double>>>> rows;  // (col, (m, a))
};

SpatialRows spatial_union_rows(const SparseMat& m, const SparseMat& a) {
  SpatialRows out;
  out.rows.resize(m.rows());
  SparseMat msum = m + a;  // union pattern
  for (int col = 0; col < msum.outerSize(); ++col)
    for (SparseMat::InnerIterator it(msum, col); it; ++it)
      out.rows[it.row()].push_back({static_cast<int>(it.col()), {m.coeff(it.row(), it.col()),
                                                                 a.coeff(it.row(), it.col())}});
  return out;
}

}  // namespace

SparseMat assembled_form(const SpaceTimeOperator& op) {
  const SpatialRows sp = spatial_union_rows(op.x_mass, op.x_curl);
  const int nt = op.nt, nx = op.nx;
  SparseMat k(static_cast<long>(nt) * nx, static_cast<long>(nt) * nx);
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t nnz_estimate = 0;
  for (int i = 0; i < nx; ++i) nnz_estimate += sp.rows[i].size();
  trip.reserve(nnz_estimate * static_cast<std::size_t>(nt) * 2);
  for (int l = 0; l < nt; ++l)
    for (int kk = 0; kk < nt; ++kk) {
      const double cm = op.deriv_sign * op.t_deriv(l, kk);
      const double ca = op.t_mass(l, kk);
      if (cm == 0.0 && ca == 0.0) continue;
      for (int i = 0; i < nx; ++i)
        for (const auto& [j, va] : sp.rows[i]) {
          const double v = cm * va.first + ca * va.second;
          if (v != 0.0) trip.emplace_back(l * nx + i, kk * nx + j, v);
        }
    }
  k.setFromTriplets(trip.begin(), trip.end());
  k.makeCompressed();
  return k;
}

namespace {

// Spatial-major flattening (index = i * nt + l) keeps the dense temporal
// coupling of the GB operator inside small per-edge blocks, which the
// fill-reducing ordering of the LU exploits.
SparseMat assembled_spatial_major(const SpaceTimeOperator& op) {
  const SpatialRows sp = spatial_union_rows(op.x_mass, op.x_curl);
  const int nt = op.nt, nx = op.nx;
  SparseMat k(static_cast<long>(nt) * nx, static_cast<long>(nt) * nx);
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t nnz_estimate = 0;
  for (int i = 0; i < nx; ++i) nnz_estimate += sp.rows[i].size();
  int t_nnz = 0;
  for (int l = 0; l < nt; ++l)
    for (int kk = 0; kk < nt; ++kk)
      if (op.t_deriv(l, kk) != 0.0 || op.t_mass(l, kk) != 0.0) ++t_nnz;
  trip.reserve(nnz_estimate * static_cast<std::size_t>(t_nnz) / std::max(1, nt));
  for (int i = 0; i < nx; ++i)
    for (const auto& [j, va] : sp.rows[i])
      for (int l = 0; l < nt; ++l)
        for (int kk = 0; kk < nt; ++kk) {
          const double v =
              op.deriv_sign * op.t_deriv(l, kk) * va.first + op.t_mass(l, kk) * va.second;
          if (v != 0.0)
            trip.emplace_back(static_cast<long>(i) * nt + l, static_cast<long>(j) * nt + kk, v);
        }
  k.setFromTriplets(trip.begin(), trip.end());
  k.makeCompressed();
  return k;
}

double relative_residual(const SpaceTimeOperator& op, const Eigen::MatrixXd& u,
                         const Eigen::MatrixXd& load) {
  const double fn = load.norm();
  if (fn == 0.0) return 0.0;
  return (apply_operator(op, u) - load).norm() / fn;
}

SpaceTimeCoefficients solve_direct(const SpaceTimeOperator& op, const Eigen::MatrixXd& load,
                                   const SolveOptions& opts, SolveInfo* info) {
  const int nt = op.nt, nx = op.nx;
  const SparseMat k = assembled_spatial_major(op);
  Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(k);
  lu.factorize(k);
  if (lu.info() != Eigen::Success)
    throw SolveError("solve: sparse LU factorization failed (" + lu.lastErrorMessage() + ")", 0.0);
  Eigen::VectorXd b(static_cast<long>(nt) * nx);
  for (int i = 0; i < nx; ++i)
    for (int l = 0; l < nt; ++l) b(static_cast<long>(i) * nt + l) = load(i, l);
  const Eigen::VectorXd x = lu.solve(b);
  SpaceTimeCoefficients out;
  out.values.resize(nx, nt);
  for (int i = 0; i < nx; ++i)
    for (int l = 0; l < nt; ++l) out.values(i, l) = x(static_cast<long>(i) * nt + l);
  const double res = relative_residual(op, out.values, load);
  if (info) {
    info->residual = res;
    info->iterative = false;
    info->iterations = 1;
  }
  if (!(res <= opts.target_residual))
    throw SolveError("solve: direct factorization residual above contract", res);
  return out;
}

// Restarted GMRES on the factored matvec, right-preconditioned by one
// spatial factorization with averaged temporal diagonal coefficients.
SpaceTimeCoefficients solve_gmres(const SpaceTimeOperator& op, const Eigen::MatrixXd& load,
                                  const SolveOptions& opts, SolveInfo* info) {
  const int nt = op.nt, nx = op.nx;
  const long n = static_cast<long>(nt) * nx;

  double alpha = 0.0, beta = 0.0;
  for (int l = 0; l < nt; ++l) {
    // main-band column per test row: k = l+1 for GP, k = l+1 (0-based l) for GB
    alpha += std::fabs(op.t_deriv(l, l));
    beta += std::fabs(op.t_mass(l, l));
  }
  alpha /= nt;
  beta /= nt;
  SparseMat p = alpha * op.x_mass + beta * op.x_curl;
  Eigen::SimplicialLDLT<SparseMat> pre(p);
  if (pre.info() != Eigen::Success)
    throw SolveError("solve: preconditioner factorization failed", 0.0);

  auto to_vec = [&](const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), n).eval();
  };
  auto to_mat = [&](const Eigen::VectorXd& v) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), nx, nt).eval();
  };
  auto apply = [&](const Eigen::VectorXd& v) { return to_vec(apply_operator(op, to_mat(v))); };
  auto precond = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd m = to_mat(v);
    Eigen::MatrixXd z(nx, nt);
    for (int l = 0; l < nt; ++l) z.col(l) = pre.solve(m.col(l));
    return to_vec(z);
  };

  const Eigen::VectorXd b = to_vec(load);
  const double bnorm = b.norm();
  SpaceTimeCoefficients out;
  if (bnorm == 0.0) {
    out.values = Eigen::MatrixXd::Zero(nx, nt);
    if (info) {
      info->residual = 0.0;
      info->iterative = true;
    }
    return out;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<double> history;
  const int m = opts.gmres_restart;
  double res = 1.0;
  for (int outer = 0; outer < opts.gmres_max_outer; ++outer) {
    Eigen::VectorXd r = b - apply(x);
    double rnorm = r.norm();
    res = rnorm / bnorm;
    history.push_back(res);
    if (res <= opts.target_residual) break;

    Eigen::MatrixXd v(n, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    std::vector<double> cs(m), sn(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    v.col(0) = r / rnorm;
    g(0) = rnorm;
    int j = 0;
    for (; j < m; ++j) {
      Eigen::VectorXd w = apply(precond(v.col(j)));
      for (int i = 0; i <= j; ++i) {
        h(i, j) = w.dot(v.col(i));
        w -= h(i, j) * v.col(i);
      }
      h(j + 1, j) = w.norm();
      if (h(j + 1, j) > 0.0) v.col(j + 1) = w / h(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[j] = h(j, j) / denom;
      sn[j] = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = cs[j] * g(j);
      history.push_back(std::fabs(g(j + 1)) / bnorm);
      if (std::fabs(g(j + 1)) / bnorm <= 0.1 * opts.target_residual) {
        ++j;
        break;
      }
    }
    Eigen::VectorXd y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += precond(v.leftCols(j) * y);
  }
  Eigen::VectorXd r = b - apply(x);
  res = r.norm() / bnorm;
  history.push_back(res);
  out.values = to_mat(x);
  if (info) {
    info->residual = res;
    info->iterative = true;
    info->iterations = static_cast<int>(history.size());
    info->history = history;
  }
  if (!(res <= opts.target_residual)) {
    if (info) info->history = history;
    throw SolveError("solve: GMRES did not reach the residual contract", res);
  }
  return out;
}

}  // namespace

SpaceTimeCoefficients solve(const SpaceTimeOperator& op, const Eigen::MatrixXd& load,
                            const SolveOptions& opts, SolveInfo* info) {
  if (load.rows() != op.nx || load.cols() != op.nt)
    throw std::invalid_argument("solve: load shape mismatch");
  if (opts.force_iterative || op.unknowns() > opts.direct_unknown_cap)
    return solve_gmres(op, load, opts, info);
  return solve_direct(op, load, opts, info);
}

SpaceTimeCoefficients march_two_step(const SpaceTimeOperator& op, const Eigen::MatrixXd& load,
                                     SolveInfo* info) {
  if (op.method != Method::GP)
    throw std::invalid_argument("march_two_step: requires the GP operator");
  const int nt = op.nt, nx = op.nx;
  if (load.rows() != nx || load.cols() != nt)
    throw std::invalid_argument("march_two_step: load shape mismatch");
  // row block l couples only the trial blocks k in {l-1, l, l+1}
  // (stored columns j = k-1 in {l-2, l-1, l})
  const double scale =
      std::max(op.t_deriv.cwiseAbs().maxCoeff(), op.t_mass.cwiseAbs().maxCoeff());
  for (int l = 0; l < nt; ++l)
    for (int j = 0; j < nt; ++j)
      if (j != l - 2 && j != l - 1 && j != l &&
          (std::fabs(op.t_deriv(l, j)) > 1e-14 * scale ||
           std::fabs(op.t_mass(l, j)) > 1e-14 * scale))
        throw std::invalid_argument("march_two_step: temporal factors are not two-banded");

  SpaceTimeCoefficients out;
  out.values = Eigen::MatrixXd::Zero(nx, nt);
  Eigen::SimplicialLDLT<SparseMat> step;
  double cached_a = 0.0, cached_m = 0.0;
  bool have_factor = false;
  for (int l = 0; l < nt; ++l) {
    const double sa = op.deriv_sign * op.t_deriv(l, l);
    const double sm = op.t_mass(l, l);
    if (!have_factor || std::fabs(sa - cached_a) > 1e-15 * std::fabs(sa) ||
        std::fabs(sm - cached_m) > 1e-15 * std::fabs(sm)) {
      SparseMat s = sa * op.x_mass + sm * op.x_curl;
      step.compute(s);
      if (step.info() != Eigen::Success)
        throw SolveError("march_two_step: step factorization failed at block " + std::to_string(l),
                         0.0);
      cached_a = sa;
      cached_m = sm;
      have_factor = true;
    }
    Eigen::VectorXd rhs = load.col(l);
    if (l >= 1) {
      const double pa = op.deriv_sign * op.t_deriv(l, l - 1);
      const double pm = op.t_mass(l, l - 1);
      rhs -= pa * (op.x_mass * out.values.col(l - 1)) + pm * (op.x_curl * out.values.col(l - 1));
    }
    if (l >= 2) {
      const double pa = op.deriv_sign * op.t_deriv(l, l - 2);
      const double pm = op.t_mass(l, l - 2);
      rhs -= pa * (op.x_mass * out.values.col(l - 2)) + pm * (op.x_curl * out.values.col(l - 2));
    }
    out.values.col(l) = step.solve(rhs);
  }
  if (info) {
    info->residual = relative_residual(op, out.values, load);
    info->iterative = false;
    info->iterations = nt;
  }
  return out;
}

CflPrediction cfl_check(const TemporalMesh& tmesh, const TriMesh& xmesh, double c_inverse) {
  tmesh.validate();
  xmesh.validate();
  if (!tmesh.uniform)
    throw std::invalid_argument("cfl_check: the CFL statement assumes a uniform temporal mesh");
  if (!(c_inverse > 0.0)) throw std::invalid_argument("cfl_check: c_I must be positive");
  CflPrediction p;
  p.cfl_bound = std::sqrt(12.0 / c_inverse);
  p.ratio = tmesh.h_max() / xmesh.h_max();
  p.predicted_stable = p.ratio < p.cfl_bound;
  return p;
}

StabilityVerdict classify_stability(double seminorm_error, double interpolation_error,
                                    const TemporalMesh& tmesh, const TriMesh& xmesh,
                                    double c_inverse) {
  StabilityVerdict v;
  v.seminorm_error = seminorm_error;
  v.reference_interpolation_error = interpolation_error;
  v.ratio = tmesh.h_max() / xmesh.h_max();
  v.cfl_bound = std::sqrt(12.0 / c_inverse);
  v.classification = (seminorm_error > 10.0 * interpolation_error ||
                      !std::isfinite(seminorm_error))
                         ? StabilityVerdict::Classification::unstable
                         : StabilityVerdict::Classification::stable;
  return v;
}

}  // namespace stfem
