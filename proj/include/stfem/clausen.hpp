#pragma once

namespace stfem {

/// Clausen-type functions on |theta| <= pi, accurate to ~1e-15:
///   clausen2(theta) = sum_{k>=1} sin(k theta) / k^2
///   clausen3(theta) = sum_{k>=1} cos(k theta) / k^3
///   clausen4(theta) = sum_{k>=1} sin(k theta) / k^4
double clausen2(double theta);
double clausen3(double theta);
double clausen4(double theta);

/// Sums over the half-integer frequencies lambda_m = pi/2 + m*pi, m >= 0,
/// for any real y (4-periodic, reduced internally):
///   halfwave_sin2(y) = sum sin(lambda_m y) / lambda_m^2
///   halfwave_cos3(y) = sum cos(lambda_m y) / lambda_m^3
///   halfwave_sin4(y) = sum sin(lambda_m y) / lambda_m^4
///   halfwave_cos1(y) = sum cos(lambda_m y) / lambda_m (conditionally convergent;
///                      log-singular at even y, defined for y not an even integer)
double halfwave_sin2(double y);
double halfwave_cos3(double y);
double halfwave_sin4(double y);
double halfwave_cos1(double y);

}  // namespace stfem
