#pragma once

#include "pnest/modem.hpp"
#include "pnest/types.hpp"

#include <optional>
#include <vector>

namespace pnest {

struct DecodeResult {
  std::vector<int> indices;  ///< constellation index per transmit antenna
  CVector symbols;
  std::optional<double> metric;  ///< ||y - H s||^2 for MLD
};

/// Linear MMSE with unit symbol power, then per-antenna slicing.
/// Throws Error{SingularSystem}.
DecodeResult mmse_decode(const CVector& y, const CMatrix& h_eq, double sigma_n_sq,
                         const Constellation& c);

/// Exhaustive search in lexicographic index order; the first minimum wins.
/// Throws Error{SearchSpaceTooLarge} beyond 1e6 candidates.
DecodeResult mld_decode(const CVector& y, const CMatrix& h_eq, const Constellation& c);

enum class Decoder { MMSE, MLD };

Decoder decoder_from_string(std::string_view name);
std::string_view to_string(Decoder d);

}  // namespace pnest
