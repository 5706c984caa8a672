#pragma once

// Reference computations shared by the unit and acceptance tests. Each one is
// written from the model equations directly rather than through library code.

#include "pnest/crlb.hpp"
#include "pnest/modem.hpp"
#include "pnest/rng.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace pnest::oracle {

// Angular observations minus their mean, drawn from the triple-sum form of the
// linearised model: AWGN plus every intra-group innovation weighted by xi.
inline RVector sample_upsilon(const CrlbProblem& p, RandomStream& rng) {
  const int n_r = p.n_r(), n_t = p.n_t(), m_i = p.m_i;
  RMatrix dphi(n_r, n_t + 1), dpsi(n_t, n_t + 1);  // column m' (1-based)
  for (Eigen::Index i = 0; i < dphi.size(); ++i) dphi(i) = std::sqrt(p.sigma_dphi_sq) * rng.normal();
  for (Eigen::Index i = 0; i < dpsi.size(); ++i) dpsi(i) = std::sqrt(p.sigma_dpsi_sq) * rng.normal();
  RVector u(n_r * n_t);
  for (int k = 0; k < n_r; ++k) {
    for (int l = 0; l < n_t; ++l) {
      double o = std::sqrt(p.sigma_n_sq / (2.0 * n_t)) * rng.normal() / std::abs(p.h(k, l));
      for (int lp = 0; lp < n_t; ++lp) {
        for (int m = 1; m <= m_i - 1; ++m)
          for (int mp = m + 1; mp <= m_i; ++mp) o -= xi(p, k, l, lp, m) * (dphi(k, mp) + dpsi(lp, mp));
        for (int m = m_i + 1; m <= n_t; ++m)
          for (int mp = m_i + 1; mp <= m; ++mp) o += xi(p, k, l, lp, m) * (dphi(k, mp) + dpsi(lp, mp));
      }
      u(k * n_t + l) = o;
    }
  }
  return u;
}

// Error of the two-sided exponential smoother on a noisy random walk, with the
// noise, forward-tail and backward-tail sums truncated to i in [1-w, 1+w].
inline double wiener_bound_series(double sigma_beta_sq, double sigma_pw_sq, int w) {
  const double tau = sigma_pw_sq / sigma_beta_sq;
  const double kappa = (1 + tau / 2) - std::sqrt((1 + tau / 2) * (1 + tau / 2) - 1);
  const double a = kappa * tau / (1 - kappa * kappa);
  auto omega = [&](int i) { return a * std::pow(kappa, std::abs(i - 1)); };
  double noise = 0.0, tail = 0.0, head = 0.0, acc = 0.0;
  for (int i = 1 - w; i <= 1 + w; ++i) noise += omega(i) * omega(i);
  for (int i = 1 + w; i >= 2; --i) {
    acc += omega(i);
    tail += acc * acc;
  }
  acc = 0.0;
  for (int i = 1 - w; i <= 0; ++i) {
    acc += omega(i);
    head += acc * acc;
  }
  return noise * sigma_beta_sq + (tail + head) * sigma_pw_sq;
}

// Two-antenna exhaustive search written as plain nested loops.
inline std::vector<int> brute_force_mld_2(const CVector& y, const CMatrix& h, const Constellation& c) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> arg;
  for (int a = 0; a < c.size(); ++a)
    for (int b = 0; b < c.size(); ++b) {
      CVector s(2);
      s << c.points[a], c.points[b];
      const double d = (y - h * s).squaredNorm();
      if (d < best) {
        best = d;
        arg = {a, b};
      }
    }
  return arg;
}

}  // namespace pnest::oracle
