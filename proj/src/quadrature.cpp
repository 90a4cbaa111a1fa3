#include "stfem/quadrature.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "stfem/common.hpp"

namespace stfem {

namespace {

GaussRule make_gauss(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  // Newton iteration on P_n with the Tricomi initial guess.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("gauss_rule: order out of range [1,64]");
  static std::array<GaussRule, 65> table;
  static std::array<std::once_flag, 65> flags;
  std::call_once(flags[n], [n] { table[n] = make_gauss(n); });
  return table[n];
}

const TriangleRule& triangle_rule_deg5() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0;
    const double b = (6.0 + s15) / 21.0;
    const double wa = (155.0 - s15) / 1200.0;
    const double wb = (155.0 + s15) / 1200.0;
    r.bary[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    r.weights[0] = 9.0 / 40.0;
    r.bary[1] = {1.0 - 2.0 * a, a, a};
    r.bary[2] = {a, 1.0 - 2.0 * a, a};
    r.bary[3] = {a, a, 1.0 - 2.0 * a};
    r.weights[1] = r.weights[2] = r.weights[3] = wa;
    r.bary[4] = {1.0 - 2.0 * b, b, b};
    r.bary[5] = {b, 1.0 - 2.0 * b, b};
    r.bary[6] = {b, b, 1.0 - 2.0 * b};
    r.weights[4] = r.weights[5] = r.weights[6] = wb;
    return r;
  }();
  return rule;
}

}  // namespace stfem
