#include "stfem/manufactured.hpp"

#include <cmath>

#include "stfem/common.hpp"

namespace stfem {

ManufacturedProblem manufactured() {
  ManufacturedProblem p;
  p.exact = [](double t, const Eigen::Vector2d& x) {
    const double x1 = x.x(), x2 = x.y();
    return Eigen::Vector2d(-5.0 * t * t * x2 * (1.0 - x2) +
                               t * t * t * std::sin(pi * x1) * x2 * (1.0 - x2),
                           t * t * x1 * (1.0 - x1));
  };
  p.dt_exact = [](double t, const Eigen::Vector2d& x) {
    const double x1 = x.x(), x2 = x.y();
    return Eigen::Vector2d(-10.0 * t * x2 * (1.0 - x2) +
                               3.0 * t * t * std::sin(pi * x1) * x2 * (1.0 - x2),
                           2.0 * t * x1 * (1.0 - x1));
  };
  p.curl_exact = [](double t, const Eigen::Vector2d& x) {
    const double x1 = x.x(), x2 = x.y();
    // d_x1 A2 - d_x2 A1
    return t * t * (1.0 - 2.0 * x1) + 5.0 * t * t * (1.0 - 2.0 * x2) -
           t * t * t * std::sin(pi * x1) * (1.0 - 2.0 * x2);
  };
  p.source = [](double t, const Eigen::Vector2d& x) {
    const double x1 = x.x(), x2 = x.y();
    return Eigen::Vector2d(
        -10.0 * (t * t - x2 * x2 + x2) + 2.0 * t * t * t * std::sin(pi * x1) +
            6.0 * t * std::sin(pi * x1) * x2 * (1.0 - x2),
        2.0 * (t * t - x1 * x1 + x1) + pi * t * t * t * (1.0 - 2.0 * x2) * std::cos(pi * x1));
  };
  return p;
}

}  // namespace stfem
