#include "pnest/config.hpp"

#include "pnest/errors.hpp"

#include <fstream>
#include <set>

namespace pnest {

std::string_view to_string(Modulation m) {
  switch (m) {
    case Modulation::BPSK: return "BPSK";
    case Modulation::QPSK: return "QPSK";
    case Modulation::QAM16: return "QAM16";
  }
  return "?";
}

Modulation modulation_from_string(std::string_view name) {
  if (name == "BPSK" || name == "bpsk") return Modulation::BPSK;
  if (name == "QPSK" || name == "qpsk") return Modulation::QPSK;
  if (name == "QAM16" || name == "qam16" || name == "16QAM" || name == "16-QAM")
    return Modulation::QAM16;
  throw Error(ErrorKind::InvalidConfig, "unknown modulation '" + std::string(name) + "'");
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
  if (n_t < 1) fail("n_t must be >= 1");
  if (n_r < n_t) fail("n_r must be >= n_t");
  if (!(sigma_dphi_sq >= 0.0) || !(sigma_dpsi_sq >= 0.0))
    fail("phase innovation variances must be >= 0");
  if (!(sigma_n_sq > 0.0)) fail("sigma_n_sq must be > 0");
  if (l_cp < 0) fail("l_cp must be >= 0");
  if (l_d < 0) fail("l_d must be >= 0");
  if (l_w < 0) fail("l_w must be >= 0");
  if (trials < 1) fail("trials must be >= 1");
  if (l_f - l_cp < n_t + l_d) fail("frame too short for one cell");
  if ((l_f - l_cp) % (n_t + l_d) != 0)
    throw Error(ErrorKind::NonIntegerCellCount,
                "(l_f - l_cp) = " + std::to_string(l_f - l_cp) + " is not a multiple of l_c = " +
                    std::to_string(n_t + l_d));
}

SystemConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "n_t", "n_r", "sigma_dphi_sq", "sigma_dpsi_sq", "sigma_n_sq", "modulation",
      "l_f", "l_cp", "l_d", "l_w", "trials", "master_seed"};
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorKind::InvalidConfig, "unknown field '" + key + "'");
  }
  SystemConfig c;
  try {
    if (j.contains("n_t")) c.n_t = j.at("n_t").get<int>();
    if (j.contains("n_r")) c.n_r = j.at("n_r").get<int>();
    if (j.contains("sigma_dphi_sq")) c.sigma_dphi_sq = j.at("sigma_dphi_sq").get<double>();
    if (j.contains("sigma_dpsi_sq")) c.sigma_dpsi_sq = j.at("sigma_dpsi_sq").get<double>();
    if (j.contains("sigma_n_sq")) c.sigma_n_sq = j.at("sigma_n_sq").get<double>();
    if (j.contains("modulation"))
      c.modulation = modulation_from_string(j.at("modulation").get<std::string>());
    if (j.contains("l_f")) c.l_f = j.at("l_f").get<int>();
    if (j.contains("l_cp")) c.l_cp = j.at("l_cp").get<int>();
    if (j.contains("l_d")) c.l_d = j.at("l_d").get<int>();
    if (j.contains("l_w")) c.l_w = j.at("l_w").get<int>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const SystemConfig& c) {
  return {{"n_t", c.n_t},
          {"n_r", c.n_r},
          {"sigma_dphi_sq", c.sigma_dphi_sq},
          {"sigma_dpsi_sq", c.sigma_dpsi_sq},
          {"sigma_n_sq", c.sigma_n_sq},
          {"modulation", std::string(to_string(c.modulation))},
          {"l_f", c.l_f},
          {"l_cp", c.l_cp},
          {"l_d", c.l_d},
          {"l_w", c.l_w},
          {"trials", c.trials},
          {"master_seed", c.master_seed}};
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

double snr_db_to_noise_var(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

FramePlan make_frame_plan(const SystemConfig& config) {
  config.validate();
  FramePlan p;
  p.n_t = config.n_t;
  p.l_f = config.l_f;
  p.l_cp = config.l_cp;
  p.l_d = config.l_d;
  p.l_p = config.n_t;
  p.l_c = p.l_p + p.l_d;
  p.n_c = (p.l_f - p.l_cp) / p.l_c;
  p.r_p = static_cast<double>(p.l_p) / p.l_c;
  const int half = (config.n_t + 1) / 2;  // ceil(n_t / 2)
  p.group_start.reserve(p.n_c);
  p.ref_index.reserve(p.n_c);
  for (int i = 1; i <= p.n_c; ++i) {
    p.group_start.push_back((i - 1) * p.l_c + 1);
    p.ref_index.push_back((i - 1) * p.l_c + half);
  }
  return p;
}

PilotBlock pilot_block(int n_t) {
  PilotBlock pb;
  pb.s.resize(n_t, n_t);
  for (int k = 0; k < n_t; ++k) {
    for (int l = 0; l < n_t; ++l) {
      // Reduce the exponent modulo n_t so entries like -1 come out exact.
      const int e = (k * l) % n_t;
      if (e == 0) {
        pb.s(k, l) = 1.0;
      } else if (2 * e == n_t) {
        pb.s(k, l) = -1.0;
      } else if (4 * e == n_t) {
        pb.s(k, l) = cplx(0.0, -1.0);
      } else if (4 * e == 3 * n_t) {
        pb.s(k, l) = cplx(0.0, 1.0);
      } else {
        pb.s(k, l) = unit_phasor(-kTwoPi * e / n_t);
      }
    }
  }
  return pb;
}

SymbolKind symbol_kind(int m, const FramePlan& plan) {
  if (m < -plan.l_cp + 1 || m > plan.payload())
    throw Error(ErrorKind::IndexOutOfFrame, "symbol index " + std::to_string(m));
  if (m <= 0) return {SymbolKind::Type::CP, 0, m + plan.l_cp};
  const int cell = (m - 1) / plan.l_c + 1;
  const int pos = (m - 1) % plan.l_c + 1;
  if (pos <= plan.l_p) return {SymbolKind::Type::Pilot, cell, pos};
  return {SymbolKind::Type::Data, cell, pos - plan.l_p};
}

}  // namespace pnest
