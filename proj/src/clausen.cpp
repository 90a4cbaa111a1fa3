#include "stfem/clausen.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "stfem/common.hpp"

namespace stfem {

namespace {

constexpr double zeta3 = 1.2020569031595942854;

// zeta(2n) from the recurrence (n + 1/2) zeta(2n) = sum_{k=1}^{n-1} zeta(2k) zeta(2n-2k).
const std::array<double, 46>& zeta_even() {
  static const std::array<double, 46> table = [] {
    std::array<double, 46> z{};
    z[1] = pi * pi / 6.0;
    for (int n = 2; n <= 45; ++n) {
      double s = 0.0;
      for (int k = 1; k <= n - 1; ++k) s += z[k] * z[n - k];
      z[n] = s / (double(n) + 0.5);
    }
    return z;
  }();
  return table;
}

}  // namespace

// Log-power series valid for |theta| < 2*pi; callers keep |theta| <= pi where
// the tail ratio is (theta/2pi)^2 <= 1/4.
double clausen2(double theta) {
  if (theta == 0.0) return 0.0;
  const auto& z = zeta_even();
  const double a = std::fabs(theta);
  double s = a - a * std::log(a);
  const double r = a * a / (4.0 * pi * pi);
  double p = a;
  for (int j = 1; j <= 45; ++j) {
    p *= r;
    s += z[j] * p / (double(j) * (2.0 * j + 1.0));
  }
  return theta > 0.0 ? s : -s;
}

double clausen3(double theta) {
  const auto& z = zeta_even();
  const double a = std::fabs(theta);
  if (a == 0.0) return zeta3;
  double s = zeta3 - 0.75 * a * a + 0.5 * a * a * std::log(a);
  const double r = a * a / (4.0 * pi * pi);
  double p = a * a;
  for (int j = 1; j <= 45; ++j) {
    p *= r;
    s -= z[j] * p / (double(j) * (2.0 * j + 1.0) * (2.0 * j + 2.0));
  }
  return s;
}

double clausen4(double theta) {
  if (theta == 0.0) return 0.0;
  const auto& z = zeta_even();
  const double a = std::fabs(theta);
  const double a3 = a * a * a;
  double s = zeta3 * a - a3 / 4.0 + a3 / 6.0 * std::log(a) - a3 / 18.0;
  const double r = a * a / (4.0 * pi * pi);
  double p = a3;
  for (int j = 1; j <= 45; ++j) {
    p *= r;
    s -= z[j] * p / (double(j) * (2.0 * j + 1.0) * (2.0 * j + 2.0) * (2.0 * j + 3.0));
  }
  return theta > 0.0 ? s : -s;
}

namespace {

// Reduce y to [0,1] using the 4-periodicity and the reflections
//   sin(lambda_m (2-y)) =  sin(lambda_m y),  cos(lambda_m (2-y)) = -cos(lambda_m y),
// returning the sign factor for the requested parity.
struct Reduced {
  double y;      // in [0, 1]
  double ssign;  // sign for sin-type sums
  double csign;  // sign for cos-type sums
};

Reduced reduce_halfwave(double y) {
  y = std::fmod(y, 4.0);
  if (y < 0.0) y += 4.0;  // in [0,4)
  Reduced r{y, 1.0, 1.0};
  if (r.y > 2.0) {  // shift by 2: sin/cos(lambda(y-2)+2lambda) with 2lambda_m = (2m+1)pi
    r.y -= 2.0;
    r.ssign = -r.ssign;
    r.csign = -r.csign;
  }
  if (r.y > 1.0) {  // reflect about 1
    r.y = 2.0 - r.y;
    r.csign = -r.csign;
  }
  return r;
}

}  // namespace

double halfwave_sin2(double y) {
  const Reduced r = reduce_halfwave(y);
  const double th = 0.5 * pi * r.y;
  return r.ssign * (4.0 / (pi * pi)) * (clausen2(th) - 0.25 * clausen2(2.0 * th));
}

double halfwave_cos3(double y) {
  const Reduced r = reduce_halfwave(y);
  const double th = 0.5 * pi * r.y;
  return r.csign * (8.0 / (pi * pi * pi)) * (clausen3(th) - 0.125 * clausen3(2.0 * th));
}

double halfwave_sin4(double y) {
  const Reduced r = reduce_halfwave(y);
  const double th = 0.5 * pi * r.y;
  return r.ssign * (16.0 / (pi * pi * pi * pi)) * (clausen4(th) - 0.0625 * clausen4(2.0 * th));
}

double halfwave_cos1(double y) {
  const Reduced r = reduce_halfwave(y);
  if (r.y == 0.0) throw std::invalid_argument("halfwave_cos1: singular at even integers");
  // sum cos(lambda y)/lambda = (2/pi) sum_odd cos(k theta)/k = (1/pi) ln cot(theta/2).
  const double th = 0.5 * pi * r.y;
  return r.csign * std::log(1.0 / std::tan(0.5 * th)) / pi;
}

}  // namespace stfem
