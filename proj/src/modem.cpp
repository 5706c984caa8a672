#include "pnest/modem.hpp"

#include "pnest/errors.hpp"

#include <array>
#include <limits>

namespace pnest {

namespace {

Constellation make_bpsk() {
  Constellation c;
  c.bits_per_symbol = 1;
  c.points = {1.0, -1.0};
  c.labels = {0, 1};
  return c;
}

Constellation make_qpsk() {
  Constellation c;
  c.bits_per_symbol = 2;
  const double a = 1.0 / std::sqrt(2.0);
  for (unsigned label = 0; label < 4; ++label) {
    const double re = (label & 2u) ? -a : a;
    const double im = (label & 1u) ? -a : a;
    c.points.emplace_back(re, im);
    c.labels.push_back(label);
  }
  return c;
}

Constellation make_qam16() {
  // Two Gray bits per axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
  static constexpr std::array<double, 4> level = {-3.0, -1.0, 3.0, 1.0};
  Constellation c;
  c.bits_per_symbol = 4;
  const double scale = 1.0 / std::sqrt(10.0);
  for (unsigned label = 0; label < 16; ++label) {
    c.points.emplace_back(scale * level[label >> 2], scale * level[label & 3u]);
    c.labels.push_back(label);
  }
  return c;
}

}  // namespace

int Constellation::slice(cplx z) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double d = std::norm(z - points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

const Constellation& constellation(Modulation format) {
  static const Constellation bpsk = make_bpsk();
  static const Constellation qpsk = make_qpsk();
  static const Constellation qam16 = make_qam16();
  switch (format) {
    case Modulation::BPSK: return bpsk;
    case Modulation::QPSK: return qpsk;
    case Modulation::QAM16: return qam16;
  }
  return qpsk;
}

std::vector<cplx> modulate(std::span<const std::uint8_t> bits, Modulation format) {
  const Constellation& c = constellation(format);
  const std::size_t b = c.bits_per_symbol;
  if (bits.size() % b != 0)
    throw Error(ErrorKind::BitCountMismatch,
                std::to_string(bits.size()) + " bits for " + std::to_string(b) + " bits/symbol");
  std::vector<cplx> out;
  out.reserve(bits.size() / b);
  for (std::size_t i = 0; i < bits.size(); i += b) {
    unsigned label = 0;
    for (std::size_t j = 0; j < b; ++j) label = (label << 1) | (bits[i + j] & 1u);
    out.push_back(c.points[label]);
  }
  return out;
}

void append_label_bits(const Constellation& c, int index, Bits& out) {
  const unsigned label = c.labels[index];
  for (int j = c.bits_per_symbol - 1; j >= 0; --j) out.push_back((label >> j) & 1u);
}

Bits demodulate_hard(std::span<const cplx> symbols, Modulation format) {
  const Constellation& c = constellation(format);
  Bits out;
  out.reserve(symbols.size() * c.bits_per_symbol);
  for (cplx z : symbols) append_label_bits(c, c.slice(z), out);
  return out;
}

std::size_t bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  if (tx.size() != rx.size())
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(tx.size()) + " vs " + std::to_string(rx.size()) + " bits");
  std::size_t n = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) n += (tx[i] != rx[i]);
  return n;
}

double bit_error_rate(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  const std::size_t n = bit_errors(tx, rx);
  if (tx.empty()) throw Error(ErrorKind::EmptyInput, "no bits to compare");
  return static_cast<double>(n) / static_cast<double>(tx.size());
}

}  // namespace pnest
