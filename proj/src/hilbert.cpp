#include "stfem/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "stfem/clausen.hpp"
#include "stfem/common.hpp"
#include "stfem/quadrature.hpp"

namespace stfem {

void SeriesTruncation::validate() const {
  if (mode == Mode::fixed_terms) {
    if (terms < 16) throw std::invalid_argument("SeriesTruncation: fixed_terms needs M >= 16");
  } else {
    if (!(tol > 0.0 && tol <= 1e-6))
      throw std::invalid_argument("SeriesTruncation: tol must lie in (0, 1e-6]");
    if (terms < 16) throw std::invalid_argument("SeriesTruncation: term cap must be >= 16");
  }
}

std::vector<double> ht_frequencies(int count) {
  if (count < 1) throw std::invalid_argument("ht_frequencies: count must be >= 1");
  std::vector<double> f(count);
  for (int k = 0; k < count; ++k) f[k] = 0.5 * pi + k * pi;
  return f;
}

namespace {

// One constant-slope piece of a basis function derivative (or a piecewise
// constant basis function itself): value `v` on (a, b).
struct Panel {
  double a, b, v;
};

// Derivative panels of hat phi_l, l = 0..N.
std::vector<Panel> hat_slope_panels(const TemporalMesh& m, int l) {
  std::vector<Panel> p;
  const int n = m.num_elements();
  if (l >= 1) p.push_back({m.nodes[l - 1], m.nodes[l], 1.0 / m.h(l)});
  if (l <= n - 1) p.push_back({m.nodes[l], m.nodes[l + 1], -1.0 / m.h(l + 1)});
  return p;
}

double hat_value_at_T(const TemporalMesh& m, int l) {
  return (l == m.num_elements()) ? 1.0 : 0.0;
}

// ---- numeric moments at one frequency (plain truncation path) ------------
//
// With d = lambda/T:
//   sine moment of a panel function w:      s(w) = (1/d) sum v [cos(d a) - cos(d b)]
//   cosine moment of a panel function w:    c(w) = (1/d) sum v [sin(d b) - sin(d a)]
//   sine moment of continuous v, v(0)=v0:   s(v) = v0/d + (1/d) c(v')
//   cosine moment of continuous v:          c(v) = v(T) sin(lambda)/d - (1/d) s(v')

double panel_sin_moment(const std::vector<Panel>& panels, double d) {
  double acc = 0.0;
  for (const auto& p : panels) acc += p.v * (std::cos(d * p.a) - std::cos(d * p.b));
  return acc / d;
}

double panel_cos_moment(const std::vector<Panel>& panels, double d) {
  double acc = 0.0;
  for (const auto& p : panels) acc += p.v * (std::sin(d * p.b) - std::sin(d * p.a));
  return acc / d;
}

// 2 * sum of |slope| over panels; |trig difference| <= 2 makes this a moment bound.
double panel_bound(const std::vector<Panel>& panels) {
  double b = 0.0;
  for (const auto& p : panels) b += 2.0 * std::fabs(p.v);
  return b;
}

// Tail sum bound: sum_{m > M} lambda_m^{-s} <= (M+1/2)^{1-s} / (pi^s (s-1)).
double lambda_tail(int s, int M) {
  return std::pow(M + 0.5, 1.0 - s) / (std::pow(pi, s) * (s - 1.0));
}

// ---- closed-form entries (acceleration path) ------------------------------
//
// Every entry is sum_m (2/T) s_m(transformed) c_m(tested).  The moments of
// piecewise-linear bases are exact trigonometric combinations in 1/lambda
// powers, so the series collapses to finitely many halfwave sums.

double aht_entry_closed(const TemporalMesh& m, int l, int k) {
  const double T = m.terminal_time;
  const auto pk = hat_slope_panels(m, k);  // transformed side, sine moments
  const auto pl = hat_slope_panels(m, l);  // tested side, cosine moments
  double acc = 0.0;
  for (const auto& e : pk) {
    const double U[2] = {e.a, e.b};
    const double su[2] = {1.0, -1.0};
    for (const auto& f : pl) {
      const double V[2] = {f.b, f.a};
      const double sv[2] = {1.0, -1.0};
      for (int iu = 0; iu < 2; ++iu)
        for (int iv = 0; iv < 2; ++iv) {
          const double s = e.v * f.v * su[iu] * sv[iv];
          acc += s * (halfwave_sin2((U[iu] + V[iv]) / T) - halfwave_sin2((U[iu] - V[iv]) / T));
        }
    }
  }
  return T * acc;
}

double mht_entry_closed(const TemporalMesh& m, int l, int k) {
  const double T = m.terminal_time;
  const auto pl = hat_slope_panels(m, l);  // transformed side
  const auto pk = hat_slope_panels(m, k);  // tested side
  double acc = 0.0;
  const double wT = hat_value_at_T(m, k);
  if (wT != 0.0) {
    // boundary moment of the terminal hat: (-1)^m / lambda term
    double part = 0.0;
    for (const auto& f : pl) {
      const double V[2] = {f.b, f.a};
      const double sv[2] = {1.0, -1.0};
      for (int iv = 0; iv < 2; ++iv)
        part += f.v * sv[iv] *
                (halfwave_cos3(1.0 - V[iv] / T) - halfwave_cos3(1.0 + V[iv] / T));
    }
    acc += wT * T * T * part;
  }
  double part2 = 0.0;
  for (const auto& f : pl) {
    const double V[2] = {f.b, f.a};
    const double sv[2] = {1.0, -1.0};
    for (const auto& e : pk) {
      const double U[2] = {e.a, e.b};
      const double su[2] = {1.0, -1.0};
      for (int iv = 0; iv < 2; ++iv)
        for (int iu = 0; iu < 2; ++iu) {
          const double s = f.v * e.v * sv[iv] * su[iu];
          part2 += s * (halfwave_sin4((V[iv] + U[iu]) / T) + halfwave_sin4((V[iv] - U[iu]) / T));
        }
    }
  }
  acc -= T * T * T * part2;
  return acc;
}

double mht10_entry_closed(const TemporalMesh& m, int l, int k) {
  const double T = m.terminal_time;
  const auto pl = hat_slope_panels(m, l);
  const double W[2] = {m.nodes[k], m.nodes[k - 1]};
  const double sw[2] = {1.0, -1.0};
  double acc = 0.0;
  for (const auto& f : pl) {
    const double V[2] = {f.b, f.a};
    const double sv[2] = {1.0, -1.0};
    for (int iv = 0; iv < 2; ++iv)
      for (int iw = 0; iw < 2; ++iw) {
        const double s = f.v * sv[iv] * sw[iw];
        acc += s * (halfwave_cos3((V[iv] - W[iw]) / T) - halfwave_cos3((V[iv] + W[iw]) / T));
      }
  }
  return T * T * acc;
}

TemporalMatrix assemble_closed(const TemporalMesh& mesh, HilbertKind kind) {
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
        case HilbertKind::A_HT: v = aht_entry_closed(mesh, l, k); break;
        case HilbertKind::M_HT:
        case HilbertKind::M_HT_hat: v = mht_entry_closed(mesh, l, k); break;
        case HilbertKind::M_HT_10: v = mht10_entry_closed(mesh, l, k); break;
      }
      out.entries(i, j) = v;
    }
  }
  out.certified_bound = 1e-14;
  return out;
}

TemporalMatrix assemble_truncated(const TemporalMesh& mesh, HilbertKind kind,
                                  const SeriesTruncation& trunc) {
  const double T = mesh.terminal_time;
  auto [rows, cols] = temporal_dof_ranges(mesh, kind);
  const int nr = rows.count(), nc = cols.count();

  std::vector<std::vector<Panel>> row_panels(nr), col_panels(nc);
  std::vector<double> col_wT(nc, 0.0);
  double bmax_row = 0.0, bmax_col = 0.0;
  bool col_has_boundary = false;
  for (int i = 0; i < nr; ++i) {
    row_panels[i] = hat_slope_panels(mesh, rows.first + i);
    bmax_row = std::max(bmax_row, panel_bound(row_panels[i]));
  }
  for (int j = 0; j < nc; ++j) {
    const int k = cols.first + j;
    if (kind == HilbertKind::M_HT_10) {
      col_panels[j] = {{mesh.nodes[k - 1], mesh.nodes[k], 1.0}};
    } else {
      col_panels[j] = hat_slope_panels(mesh, k);
      col_wT[j] = hat_value_at_T(mesh, k);
      if (col_wT[j] != 0.0) col_has_boundary = true;
    }
    bmax_col = std::max(bmax_col, panel_bound(col_panels[j]));
  }

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nr, nc);
  Eigen::VectorXd rvec(nr), cvec(nc);
  const int cap = trunc.terms;
  double rel_bound = std::numeric_limits<double>::infinity();
  int m = 0;
  for (; m < cap; ++m) {
    const double lam = 0.5 * pi + m * pi;
    const double d = lam / T;
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < nr; ++i) {
      // rows always carry the H_T-transformed function for M-kinds and the
      // cosine-tested derivative for A_HT
      if (kind == HilbertKind::A_HT)
        rvec(i) = panel_cos_moment(row_panels[i], d);
      else
        rvec(i) = panel_cos_moment(row_panels[i], d) / d;  // s(hat) = c(slopes)/d
    }
    for (int j = 0; j < nc; ++j) {
      switch (kind) {
        case HilbertKind::A_HT: cvec(j) = panel_sin_moment(col_panels[j], d); break;
        case HilbertKind::M_HT_10: cvec(j) = panel_cos_moment(col_panels[j], d); break;
        case HilbertKind::M_HT:
        case HilbertKind::M_HT_hat:
          cvec(j) = col_wT[j] * sgn / d - panel_sin_moment(col_panels[j], d) / d;
          break;
      }
    }
    acc += (2.0 / T) * rvec * cvec.transpose();

    if (trunc.mode == SeriesTruncation::Mode::tolerance && m >= 31 && (m & 7) == 7) {
      double tail = 0.0;
      switch (kind) {
        case HilbertKind::A_HT:
          tail = (2.0 / T) * T * T * bmax_row * bmax_col * lambda_tail(2, m);
          break;
        case HilbertKind::M_HT_10:
          tail = (2.0 / T) * T * T * T * bmax_row * 2.0 * lambda_tail(3, m);
          break;
        case HilbertKind::M_HT:
        case HilbertKind::M_HT_hat:
          tail = (2.0 / T) * T * T * T * T * bmax_row * bmax_col * lambda_tail(4, m);
          if (col_has_boundary)
            tail += (2.0 / T) * T * T * T * bmax_row * lambda_tail(3, m);
          break;
      }
      const double scale = std::max(acc.cwiseAbs().maxCoeff(), 1e-300);
      rel_bound = tail / scale;
      if (rel_bound <= trunc.tol) {
        ++m;
        break;
      }
    }
  }

  TemporalMatrix out;
  out.rows = rows;
  out.cols = cols;
  out.entries = std::move(acc);
  if (trunc.mode == SeriesTruncation::Mode::tolerance) {
    if (rel_bound > trunc.tol)
      throw AccuracyError("assemble_hilbert(" + to_string(kind) +
                              "): tolerance unreachable within term cap",
                          rel_bound);
    out.certified_bound = rel_bound;
  } else {
    out.certified_bound = std::numeric_limits<double>::quiet_NaN();  // uncertified
  }
  return out;
}

}  // namespace

TemporalMatrix assemble_hilbert(const TemporalMesh& mesh, HilbertKind kind,
                                const SeriesTruncation& trunc) {
  mesh.validate();
  trunc.validate();
  if (trunc.mode == SeriesTruncation::Mode::tolerance && !trunc.acceleration &&
      kind == HilbertKind::A_HT)
    throw std::invalid_argument(
        "assemble_hilbert: tolerance mode requires acceleration for A_HT "
        "(terms decay only like 1/lambda^2)");
  if (trunc.acceleration) return assemble_closed(mesh, kind);
  return assemble_truncated(mesh, kind, trunc);
}

double ht_eval_piecewise_linear(const TemporalMesh& mesh, const Eigen::VectorXd& nodal_values,
                                double t, const SeriesTruncation& trunc) {
  mesh.validate();
  trunc.validate();
  const int n = mesh.num_elements();
  if (nodal_values.size() != n + 1)
    throw std::invalid_argument("ht_eval_piecewise_linear: nodal value count mismatch");
  const double T = mesh.terminal_time;
  if (!(t > 0.0 && t < T))
    throw std::invalid_argument("ht_eval_piecewise_linear: t must lie in (0,T)");

  std::vector<Panel> slopes;
  for (int e = 1; e <= n; ++e)
    slopes.push_back(
        {mesh.nodes[e - 1], mesh.nodes[e], (nodal_values(e) - nodal_values(e - 1)) / mesh.h(e)});

  if (trunc.acceleration || trunc.mode == SeriesTruncation::Mode::tolerance) {
    if (nodal_values(0) != 0.0)
      throw std::invalid_argument(
          "ht_eval_piecewise_linear: certified evaluation requires v(0) = 0");
    // (2/T) T^2 sum_m sin(lam V/T) cos(lam t/T)/lam^2 with the product-to-sum half
    double acc = 0.0;
    for (const auto& p : slopes) {
      const double V[2] = {p.b, p.a};
      const double sv[2] = {1.0, -1.0};
      for (int iv = 0; iv < 2; ++iv)
        acc += p.v * sv[iv] *
               (halfwave_sin2((V[iv] + t) / T) + halfwave_sin2((V[iv] - t) / T));
    }
    return T * acc;
  }

  // Plain partial sum; admits v(0) != 0 (uncertified, L^2-sense only).
  double acc = 0.0;
  for (int m = 0; m < trunc.terms; ++m) {
    const double lam = 0.5 * pi + m * pi;
    const double d = lam / T;
    const double s_m = nodal_values(0) / d + panel_cos_moment(slopes, d) / d;
    acc += (2.0 / T) * s_m * std::cos(d * t);
  }
  return acc;
}

double pv_transform_eval(const std::function<double(double)>& f, double t, double terminal_time,
                         int quad_order, const std::vector<double>& breakpoints) {
  const double T = terminal_time;
  if (!(t > 0.0 && t < T)) throw std::invalid_argument("pv_transform_eval: t must lie in (0,T)");
  const auto& rule = gauss_rule(std::max(2, quad_order));
  const double rho = 0.5 * std::min(t, T - t);

  // Symmetric core around the s = t singularity: the odd kernel pairing
  // leaves the finite integrand [f(t+u) - f(t-u)] / sin(pi u / 2T).
  // Jumps of f at distance u* from t make the paired integrand step onto a
  // 1/u profile there, so consecutive panels must stay within a factor 2.
  std::set<double> ucuts;
  ucuts.insert(rho);
  double dlev = rho;
  for (int k = 0; k < 12; ++k) {
    dlev *= 0.5;
    ucuts.insert(dlev);
  }
  for (double bp : breakpoints) {
    const double u = std::fabs(bp - t);
    if (u > 0.0 && u < rho) ucuts.insert(u);
  }
  {
    const std::vector<double> base(ucuts.begin(), ucuts.end());
    for (std::size_t i = 0; i + 1 < base.size(); ++i) {
      double d = base[i + 1];
      while (d > 2.0 * base[i]) {
        d *= 0.5;
        ucuts.insert(d);
      }
    }
  }
  double core = 0.0;
  double prev = 0.0;
  for (double c : ucuts) {
    core += gauss_integrate(rule, prev, c, [&](double u) {
      return (f(t + u) - f(t - u)) / std::sin(0.5 * pi * u / T);
    });
    prev = c;
  }

  // Remaining panels carry the regular parts of both kernel terms. The
  // kernels are singular at s = t (excluded by the core) and, through the
  // (s+t) term, at the reflections s = -t and s = 2T - t just outside [0,T];
  // panels refine geometrically toward each end until they resolve the
  // distance to the nearest singular point.
  auto near_kernel = [&](double s) { return f(s) / std::sin(0.5 * pi * (s + t) / T); };
  auto full_kernel = [&](double s) {
    return f(s) * (1.0 / std::sin(0.5 * pi * (s + t) / T) + 1.0 / std::sin(0.5 * pi * (s - t) / T));
  };
  auto singular_distance = [&](double s) {
    double d = std::fabs(s - t);
    d = std::min(d, s + t);
    d = std::min(d, 2.0 * T - t - s);
    return std::max(d, 1e-300);
  };

  auto graded_cuts = [&](double a, double b) {
    std::set<double> cuts{a, b};
    const double len = b - a;
    for (auto [end, sign] : {std::pair{a, 1.0}, {b, -1.0}}) {
      const double target = 0.125 * singular_distance(end);
      double d = 0.5 * len;
      for (int k = 0; k < 60 && d > target; ++k) {
        cuts.insert(end + sign * d);
        d *= 0.5;
      }
    }
    for (double bp : breakpoints)
      if (bp > a && bp < b) cuts.insert(bp);
    return cuts;
  };
  auto integrate_cuts = [&](const std::set<double>& cuts, auto&& g) {
    double acc = 0.0;
    double p = *cuts.begin();
    for (double c : cuts) {
      if (c > p) acc += gauss_integrate(rule, p, c, g);
      p = c;
    }
    return acc;
  };

  double rest = 0.0;
  if (t - rho > 0.0) rest += integrate_cuts(graded_cuts(0.0, t - rho), full_kernel);
  if (t + rho < T) rest += integrate_cuts(graded_cuts(t + rho, T), full_kernel);
  rest += integrate_cuts(graded_cuts(t - rho, t + rho), near_kernel);

  return (core + rest) / (2.0 * T);
}

double hilbert_adjoint_residual(const TemporalMesh& mesh, const SeriesTruncation& trunc) {
  mesh.validate();
  trunc.validate();
  const double T = mesh.terminal_time;
  const int n = mesh.num_elements();
  const auto& rule = gauss_rule(16);

  // H_T^{-1} w for piecewise-linear w, evaluated pointwise.
  auto inv_eval = [&](const Eigen::VectorXd& w, double t) {
    std::vector<Panel> slopes;
    for (int e = 1; e <= n; ++e)
      slopes.push_back({mesh.nodes[e - 1], mesh.nodes[e], (w(e) - w(e - 1)) / mesh.h(e)});
    if (trunc.acceleration || trunc.mode == SeriesTruncation::Mode::tolerance) {
      double acc = 0.0;
      const double wT = w(n);
      if (wT != 0.0) acc += wT * (halfwave_cos1(1.0 - t / T) - halfwave_cos1(1.0 + t / T));
      double part = 0.0;
      for (const auto& p : slopes) {
        const double U[2] = {p.a, p.b};
        const double su[2] = {1.0, -1.0};
        for (int iu = 0; iu < 2; ++iu)
          part += p.v * su[iu] *
                  (halfwave_sin2((U[iu] + t) / T) - halfwave_sin2((U[iu] - t) / T));
      }
      return acc - T * part;
    }
    double acc = 0.0;
    for (int m = 0; m < trunc.terms; ++m) {
      const double lam = 0.5 * pi + m * pi;
      const double d = lam / T;
      const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
      const double c_m = w(n) * sgn / d - panel_sin_moment(slopes, d) / d;
      acc += (2.0 / T) * c_m * std::sin(d * t);
    }
    return acc;
  };

  auto hat = [&](int l) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
    v(l) = 1.0;
    return v;
  };
  auto eval_pw = [&](const Eigen::VectorXd& v, double t) {
    int e = 1;
    while (e < n && t > mesh.nodes[e]) ++e;
    const double s = (t - mesh.nodes[e - 1]) / mesh.h(e);
    return v(e - 1) * (1.0 - s) + v(e) * s;
  };

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> probes;
  probes.emplace_back(hat(1), hat(1));
  probes.emplace_back(hat(1), hat(n));
  if (n >= 2) probes.emplace_back(hat(n), hat(std::max(1, n / 2)));
  {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1), w = Eigen::VectorXd::Zero(n + 1);
    for (int i = 1; i <= n; ++i) {
      v(i) = std::sin(2.41 * i) * 0.5 + 0.5;
      w(i) = std::cos(1.73 * i + 0.2);
    }
    w(0) = std::cos(0.2);
    probes.emplace_back(v, w);
  }

  // Deep grading: the transforms have log-singular derivatives at every mesh
  // node and H_T^{-1} of a terminal-valued probe is log singular at T itself.
  double worst = 0.0;
  for (const auto& [v, w] : probes) {
    double lhs = 0.0, rhs = 0.0;
    for (int e = 1; e <= n; ++e) {
      lhs += gauss_integrate_graded(rule, mesh.nodes[e - 1], mesh.nodes[e], 34, 34, [&](double t) {
        return ht_eval_piecewise_linear(mesh, v, t, trunc) * eval_pw(w, t);
      });
      rhs += gauss_integrate_graded(rule, mesh.nodes[e - 1], mesh.nodes[e], 34, 34,
                                    [&](double t) { return eval_pw(v, t) * inv_eval(w, t); });
    }
    worst = std::max(worst, std::fabs(lhs - rhs));
  }

  // analytic eigenpair probe: H_T sin_0 = cos_0 and H_T^{-1} cos_0 = sin_0
  {
    const double lam0 = 0.5 * pi;
    double lhs = 0.0, rhs = 0.0;
    for (int e = 1; e <= n; ++e) {
      lhs += gauss_integrate(rule, mesh.nodes[e - 1], mesh.nodes[e], [&](double t) {
        const double c = std::cos(lam0 * t / T);
        return c * c;
      });
      rhs += gauss_integrate(rule, mesh.nodes[e - 1], mesh.nodes[e], [&](double t) {
        const double s = std::sin(lam0 * t / T);
        return s * s;
      });
    }
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return worst;
}

}  // namespace stfem
