#pragma once

#include "pnest/config.hpp"
#include "pnest/types.hpp"

namespace pnest {

/// Angular-observation model of one pilot group, evaluated at a parameter point.
/// Antenna indices k, l, l_prime and parameter index q are 0-based; symbol
/// indices m within the group are 1-based, with m_i the reference symbol.
struct CrlbProblem {
  CMatrix h;
  PilotBlock pilot;
  RVector psi_ref;  ///< transmit phases at m_i, length n_t
  double sigma_n_sq = 0.0;
  double sigma_dphi_sq = 0.0;
  double sigma_dpsi_sq = 0.0;
  int m_i = 1;

  int n_r() const { return static_cast<int>(h.rows()); }
  int n_t() const { return static_cast<int>(h.cols()); }
  int n_params() const { return n_r() + n_t() - 1; }
};

/// Problem with the standard pilot block and m_i = ceil(n_t / 2).
CrlbProblem make_crlb_problem(const CMatrix& h, const RVector& psi_ref, double sigma_n_sq,
                              double sigma_dphi_sq, double sigma_dpsi_sq);

struct FisherResult {
  RMatrix sigma_upsilon;
  RMatrix fim;
  RVector crlb;
};

/// h_{k,l'} / (n_t h_{k,l}) e^{j(psi_l' - psi_l)} s_{l',m} conj(s_{l,m}).
cplx eta(const CrlbProblem& p, int k, int l, int l_prime, int m);
double xi(const CrlbProblem& p, int k, int l, int l_prime, int m);
double xi_derivative(const CrlbProblem& p, int k, int l, int l_prime, int m, int q);

/// Derivative of the observation mean; rows ordered k-major (k * n_t + l).
RMatrix mean_jacobian(int n_r, int n_t);

RMatrix observation_covariance(const CrlbProblem& p);
RMatrix covariance_jacobian(const CrlbProblem& p, int q);

/// Throws Error{SingularCovariance} or Error{SingularFim}.
FisherResult fisher_information(const CrlbProblem& p);

/// AWGN-only bound.
RVector crlb_low_snr(const CrlbProblem& p);
/// Phase-noise floor without AWGN and cross terms. The covariance is rank
/// deficient for n_r, n_t >= 2, so its pseudo-inverse is used; the mean
/// Jacobian lies in its range.
RVector crlb_high_snr(const CrlbProblem& p);

/// Steady-state MSE of the infinite two-sided Wiener smoother applied to a
/// random walk with step variance sigma_pw_sq observed in noise sigma_beta_sq.
/// Throws Error{NonPositiveVariance}.
double wiener_mse_bound(double sigma_beta_sq, double sigma_pw_sq);

}  // namespace pnest
