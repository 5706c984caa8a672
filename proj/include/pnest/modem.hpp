#pragma once

#include "pnest/config.hpp"
#include "pnest/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pnest {

using Bits = std::vector<std::uint8_t>;

/// Unit-average-power constellation with Gray labels. Point i carries label i,
/// read MSB-first.
struct Constellation {
  std::vector<cplx> points;
  std::vector<unsigned> labels;
  int bits_per_symbol = 0;

  int size() const { return static_cast<int>(points.size()); }
  /// Index of the nearest point; ties go to the lowest index.
  int slice(cplx z) const;
};

const Constellation& constellation(Modulation format);

std::vector<cplx> modulate(std::span<const std::uint8_t> bits, Modulation format);
Bits demodulate_hard(std::span<const cplx> symbols, Modulation format);

/// Appends the label bits of point `index` to `out`.
void append_label_bits(const Constellation& c, int index, Bits& out);

double bit_error_rate(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);
/// Hamming distance; same preconditions as bit_error_rate.
std::size_t bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

}  // namespace pnest
