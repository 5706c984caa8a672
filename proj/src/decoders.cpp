#include "pnest/decoders.hpp"

#include "pnest/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace pnest {

DecodeResult mmse_decode(const CVector& y, const CMatrix& h_eq, double sigma_n_sq,
                         const Constellation& c) {
  if (y.size() != h_eq.rows() || h_eq.rows() < h_eq.cols())
    throw Error(ErrorKind::ShapeMismatch, "MMSE needs n_r >= n_t and matching y");
  const Eigen::Index n_t = h_eq.cols();
  CMatrix gram = h_eq.adjoint() * h_eq;
  gram.diagonal().array() += sigma_n_sq;
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "regularized normal matrix is singular");
  const CVector soft = llt.solve(h_eq.adjoint() * y);
  if (!soft.allFinite()) throw Error(ErrorKind::SingularSystem, "non-finite MMSE output");
  DecodeResult r;
  r.indices.resize(n_t);
  r.symbols.resize(n_t);
  for (Eigen::Index l = 0; l < n_t; ++l) {
    r.indices[l] = c.slice(soft(l));
    r.symbols(l) = c.points[r.indices[l]];
  }
  return r;
}

DecodeResult mld_decode(const CVector& y, const CMatrix& h_eq, const Constellation& c) {
  const Eigen::Index n_t = h_eq.cols();
  if (y.size() != h_eq.rows()) throw Error(ErrorKind::ShapeMismatch, "MLD y length");
  const double space = std::pow(static_cast<double>(c.size()), static_cast<double>(n_t));
  if (space > 1e6)
    throw Error(ErrorKind::SearchSpaceTooLarge, std::to_string(space) + " candidates");
  const int total = static_cast<int>(std::lround(space));
  const int q = c.size();

  std::vector<int> idx(n_t, 0);
  std::vector<int> best(n_t, 0);
  double best_metric = std::numeric_limits<double>::infinity();
  CVector s(n_t);
  for (int n = 0; n < total; ++n) {
    // Decode n as base-q digits, most significant first (lexicographic order).
    int rem = n;
    for (Eigen::Index l = n_t - 1; l >= 0; --l) {
      idx[l] = rem % q;
      rem /= q;
      s(l) = c.points[idx[l]];
    }
    const double metric = (y - h_eq * s).squaredNorm();
    if (metric < best_metric) {
      best_metric = metric;
      best = idx;
    }
  }
  DecodeResult r;
  r.indices = best;
  r.symbols.resize(n_t);
  for (Eigen::Index l = 0; l < n_t; ++l) r.symbols(l) = c.points[best[l]];
  r.metric = best_metric;
  return r;
}

Decoder decoder_from_string(std::string_view name) {
  if (name == "mmse" || name == "MMSE") return Decoder::MMSE;
  if (name == "mld" || name == "MLD") return Decoder::MLD;
  throw Error(ErrorKind::InvalidConfig, "unknown decoder '" + std::string(name) + "'");
}

std::string_view to_string(Decoder d) { return d == Decoder::MMSE ? "mmse" : "mld"; }

}  // namespace pnest
