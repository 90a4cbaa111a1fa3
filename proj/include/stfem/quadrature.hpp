#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace stfem {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule with n points (1 <= n <= 64), exact for polynomials of degree 2n-1.
const GaussRule& gauss_rule(int n);

/// Map a [-1,1] rule onto [a,b]: calls f at the mapped nodes and accumulates.
template <class F>
double gauss_integrate(const GaussRule& rule, double a, double b, F&& f) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

/// Integrate over [a,b] with geometric panel refinement toward one or both
/// endpoints (ratio 1/2). Handles integrable endpoint singularities.
template <class F>
double gauss_integrate_graded(const GaussRule& rule, double a, double b, int levels_at_a,
                              int levels_at_b, F&& f) {
  if (b <= a) return 0.0;
  std::vector<double> cuts;
  cuts.push_back(a);
  const double len = b - a;
  double frac = 0.5;
  std::vector<double> from_a, from_b;
  for (int k = 0; k < levels_at_a; ++k, frac *= 0.5) from_a.push_back(a + len * frac * 0.5);
  frac = 0.5;
  for (int k = 0; k < levels_at_b; ++k, frac *= 0.5) from_b.push_back(b - len * frac * 0.5);
  for (auto it = from_a.rbegin(); it != from_a.rend(); ++it) cuts.push_back(*it);
  cuts.push_back(0.5 * (a + b));
  for (double c : from_b) cuts.push_back(c);
  cuts.push_back(b);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) acc += gauss_integrate(rule, cuts[i], cuts[i + 1], f);
  return acc;
}

/// Degree-5 7-point rule on a triangle, barycentric coordinates and weights
/// normalized to sum 1 (multiply by the triangle area).
struct TriangleRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weights;
};

const TriangleRule& triangle_rule_deg5();

/// Apply the degree-5 rule on `subdiv` levels of uniform triangle subdivision;
/// calls f(point, weight) with weights summing to the triangle area.
template <class F>
void triangle_quadrature(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                         const Eigen::Vector2d& p2, int subdiv, F&& f) {
  if (subdiv > 0) {
    const Eigen::Vector2d m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
    triangle_quadrature(p0, m01, m20, subdiv - 1, f);
    triangle_quadrature(p1, m12, m01, subdiv - 1, f);
    triangle_quadrature(p2, m20, m12, subdiv - 1, f);
    triangle_quadrature(m01, m12, m20, subdiv - 1, f);
    return;
  }
  const TriangleRule& rule = triangle_rule_deg5();
  const double area =
      0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x()));
  for (int q = 0; q < 7; ++q) {
    const auto& b = rule.bary[q];
    f(Eigen::Vector2d(b[0] * p0 + b[1] * p1 + b[2] * p2), rule.weights[q] * area);
  }
}

}  // namespace stfem
