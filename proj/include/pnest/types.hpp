#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace pnest {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps any angle onto [-pi, pi).
inline double wrap_to_pi(double x) {
  const double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
  return r >= kPi ? r - kTwoPi : r;
}

// Element-wise angle on [-pi, pi). std::arg returns (-pi, pi].
inline double angle(cplx z) { return wrap_to_pi(std::arg(z)); }

inline cplx unit_phasor(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace pnest
