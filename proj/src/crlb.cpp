#include "pnest/crlb.hpp"

#include "pnest/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace pnest {

CrlbProblem make_crlb_problem(const CMatrix& h, const RVector& psi_ref, double sigma_n_sq,
                              double sigma_dphi_sq, double sigma_dpsi_sq) {
  if (psi_ref.size() != h.cols()) throw Error(ErrorKind::ShapeMismatch, "psi_ref length");
  CrlbProblem p;
  p.h = h;
  p.pilot = pilot_block(static_cast<int>(h.cols()));
  p.psi_ref = psi_ref;
  p.sigma_n_sq = sigma_n_sq;
  p.sigma_dphi_sq = sigma_dphi_sq;
  p.sigma_dpsi_sq = sigma_dpsi_sq;
  p.m_i = static_cast<int>((h.cols() + 1) / 2);
  return p;
}

namespace {

void check_amplitudes(const CrlbProblem& p) {
  for (Eigen::Index k = 0; k < p.h.rows(); ++k)
    for (Eigen::Index l = 0; l < p.h.cols(); ++l)
      if (p.h(k, l) == cplx(0.0))
        throw Error(ErrorKind::ZeroAmplitude,
                    "h(" + std::to_string(k) + "," + std::to_string(l) + ") = 0");
}

// Accumulation weights of the intra-group phase innovations in each
// observation. Column m' - 2 of `phi` holds the weight of the receive
// innovation at symbol m'; `psi` is indexed [l' * (n_t - 1) + m' - 2].
// With q >= 0 the weights are differentiated w.r.t. beta_q instead.
struct InnovationWeights {
  RMatrix phi;
  RMatrix psi;
};

InnovationWeights innovation_weights(const CrlbProblem& p, int q = -1) {
  const int n_r = p.n_r();
  const int n_t = p.n_t();
  const int steps = n_t - 1;
  InnovationWeights w{RMatrix::Zero(n_r * n_t, steps), RMatrix::Zero(n_r * n_t, n_t * steps)};
  auto term = [&](int k, int l, int lp, int m) {
    return q < 0 ? xi(p, k, l, lp, m) : xi_derivative(p, k, l, lp, m, q);
  };
  for (int k = 0; k < n_r; ++k) {
    for (int l = 0; l < n_t; ++l) {
      const int r = k * n_t + l;
      for (int mp = 2; mp <= n_t; ++mp) {
        const bool before = mp <= p.m_i;
        const int lo = before ? 1 : mp;
        const int hi = before ? mp - 1 : n_t;
        const double sign = before ? -1.0 : 1.0;
        double total = 0.0;
        for (int lp = 0; lp < n_t; ++lp) {
          double s = 0.0;
          for (int m = lo; m <= hi; ++m) s += term(k, l, lp, m);
          w.psi(r, lp * steps + mp - 2) = sign * s;
          total += s;
        }
        w.phi(r, mp - 2) = sign * total;
      }
    }
  }
  return w;
}

// delta(k1 - k2) over k-major rows.
RMatrix same_receiver_mask(int n_r, int n_t) {
  RMatrix mask = RMatrix::Zero(n_r * n_t, n_r * n_t);
  for (int k = 0; k < n_r; ++k) mask.block(k * n_t, k * n_t, n_t, n_t).setOnes();
  return mask;
}

RMatrix awgn_covariance(const CrlbProblem& p) {
  const int n_r = p.n_r();
  const int n_t = p.n_t();
  RMatrix d = RMatrix::Zero(n_r * n_t, n_r * n_t);
  for (int k = 0; k < n_r; ++k)
    for (int l = 0; l < n_t; ++l)
      d(k * n_t + l, k * n_t + l) = p.sigma_n_sq / (2.0 * n_t * std::norm(p.h(k, l)));
  return d;
}

Eigen::LLT<RMatrix> factor_covariance(const RMatrix& sigma) {
  Eigen::LLT<RMatrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularCovariance, "observation covariance is not positive definite");
  return llt;
}

RVector invert_fim_diagonal(const RMatrix& fim) {
  Eigen::LLT<RMatrix> llt(fim);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularFim, "Fisher information is not positive definite");
  const RMatrix inv = llt.solve(RMatrix::Identity(fim.rows(), fim.cols()));
  return inv.diagonal();
}

}  // namespace

cplx eta(const CrlbProblem& p, int k, int l, int l_prime, int m) {
  const cplx hkl = p.h(k, l);
  if (hkl == cplx(0.0)) throw Error(ErrorKind::ZeroAmplitude, "h(k,l) = 0");
  const double n_t = static_cast<double>(p.n_t());
  return p.h(k, l_prime) / (n_t * hkl) * unit_phasor(p.psi_ref(l_prime) - p.psi_ref(l)) *
         p.pilot.s(l_prime, m - 1) * std::conj(p.pilot.s(l, m - 1));
}

double xi(const CrlbProblem& p, int k, int l, int l_prime, int m) {
  return eta(p, k, l, l_prime, m).real();
}

double xi_derivative(const CrlbProblem& p, int k, int l, int l_prime, int m, int q) {
  if (q < p.n_r() || l == l_prime) return 0.0;
  const int t = q - p.n_r();
  if (l_prime == t) return -eta(p, k, l, l_prime, m).imag();
  if (l == t) return eta(p, k, l, l_prime, m).imag();
  return 0.0;
}

RMatrix mean_jacobian(int n_r, int n_t) {
  RMatrix j = RMatrix::Zero(n_r * n_t, n_r + n_t - 1);
  for (int k = 0; k < n_r; ++k) {
    for (int l = 0; l < n_t; ++l) {
      j(k * n_t + l, k) = 1.0;
      if (l < n_t - 1) j(k * n_t + l, n_r + l) = 1.0;
    }
  }
  return j;
}

RMatrix observation_covariance(const CrlbProblem& p) {
  check_amplitudes(p);
  const InnovationWeights w = innovation_weights(p);
  const RMatrix mask = same_receiver_mask(p.n_r(), p.n_t());
  return awgn_covariance(p) + p.sigma_dphi_sq * (w.phi * w.phi.transpose()).cwiseProduct(mask) +
         p.sigma_dpsi_sq * (w.psi * w.psi.transpose());
}

RMatrix covariance_jacobian(const CrlbProblem& p, int q) {
  check_amplitudes(p);
  const InnovationWeights w = innovation_weights(p);
  const InnovationWeights dw = innovation_weights(p, q);
  const RMatrix mask = same_receiver_mask(p.n_r(), p.n_t());
  const RMatrix dphi = dw.phi * w.phi.transpose();
  const RMatrix dpsi = dw.psi * w.psi.transpose();
  return p.sigma_dphi_sq * (dphi + dphi.transpose()).cwiseProduct(mask) +
         p.sigma_dpsi_sq * (dpsi + dpsi.transpose());
}

FisherResult fisher_information(const CrlbProblem& p) {
  const int np = p.n_params();
  FisherResult r;
  r.sigma_upsilon = observation_covariance(p);
  const auto llt = factor_covariance(r.sigma_upsilon);
  const RMatrix j = mean_jacobian(p.n_r(), p.n_t());
  const RMatrix sinv_j = llt.solve(j);

  std::vector<RMatrix> sinv_d;
  sinv_d.reserve(np);
  for (int q = 0; q < np; ++q) sinv_d.push_back(llt.solve(covariance_jacobian(p, q)));

  r.fim = j.transpose() * sinv_j;
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b)
      r.fim(a, b) += 0.5 * (sinv_d[a].cwiseProduct(sinv_d[b].transpose())).sum();
  r.fim = 0.5 * (r.fim + r.fim.transpose());
  r.crlb = invert_fim_diagonal(r.fim);
  return r;
}

RVector crlb_low_snr(const CrlbProblem& p) {
  check_amplitudes(p);
  const RMatrix j = mean_jacobian(p.n_r(), p.n_t());
  const auto llt = factor_covariance(awgn_covariance(p));
  return invert_fim_diagonal(j.transpose() * llt.solve(j));
}

RVector crlb_high_snr(const CrlbProblem& p) {
  const int n_r = p.n_r();
  const int n_t = p.n_t();
  double c2 = 0.0;
  for (int mp = 2; mp <= n_t; ++mp) {
    const double c = mp <= p.m_i ? (mp - 1.0) / n_t : (n_t - mp + 1.0) / n_t;
    c2 += c * c;
  }
  const int n = n_r * n_t;
  RMatrix sigma = RMatrix::Zero(n, n);
  for (int r1 = 0; r1 < n; ++r1) {
    for (int r2 = 0; r2 < n; ++r2) {
      const bool same_k = r1 / n_t == r2 / n_t;
      const bool same_l = r1 % n_t == r2 % n_t;
      sigma(r1, r2) = c2 * (same_k * p.sigma_dphi_sq + same_l * p.sigma_dpsi_sq);
    }
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(sigma);
  const RVector& ev = eig.eigenvalues();
  const double top = ev.size() ? ev(ev.size() - 1) : 0.0;
  if (!(top > 0.0))
    throw Error(ErrorKind::SingularCovariance, "phase-noise floor covariance vanishes");
  RVector inv = RVector::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-10 * top) inv(i) = 1.0 / ev(i);
  const RMatrix pinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  const RMatrix j = mean_jacobian(n_r, n_t);
  return invert_fim_diagonal(j.transpose() * pinv * j);
}

double wiener_mse_bound(double sigma_beta_sq, double sigma_pw_sq) {
  if (!(sigma_beta_sq > 0.0) || !(sigma_pw_sq > 0.0))
    throw Error(ErrorKind::NonPositiveVariance, "Wiener bound needs positive variances");
  return 1.0 / std::sqrt(4.0 / (sigma_pw_sq * sigma_beta_sq) +
                         1.0 / (sigma_beta_sq * sigma_beta_sq));
}

}  // namespace pnest
