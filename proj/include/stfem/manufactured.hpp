#pragma once

#include <Eigen/Dense>
#include <functional>

namespace stfem {

/// Closed-form problem data: exact solution A, its time derivative and curl,
/// the matching source j, and the material coefficients.
struct ManufacturedProblem {
  std::function<Eigen::Vector2d(double, const Eigen::Vector2d&)> exact;
  std::function<Eigen::Vector2d(double, const Eigen::Vector2d&)> dt_exact;
  std::function<double(double, const Eigen::Vector2d&)> curl_exact;
  std::function<Eigen::Vector2d(double, const Eigen::Vector2d&)> source;
  Eigen::Matrix2d epsilon = Eigen::Matrix2d::Identity();
  double mu = 1.0;
};

/// The polynomial/trigonometric benchmark on the unit square with homogeneous
/// initial and tangential boundary conditions.
ManufacturedProblem manufactured();

}  // namespace stfem
