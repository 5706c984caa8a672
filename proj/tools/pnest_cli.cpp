// pnest: Monte Carlo sweeps, CRLB evaluation and complexity tables for the
// pilot-aided joint phase/channel estimator.

#include "pnest/airsim.hpp"
#include "pnest/complexity.hpp"
#include "pnest/config.hpp"
#include "pnest/crlb.hpp"
#include "pnest/errors.hpp"
#include "pnest/harness.hpp"
#include "pnest/rng.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pnest;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

SystemConfig load_with_seed(const std::string& path) {
  SystemConfig c = path.empty() ? SystemConfig{} : load_config(path);
  if (const char* env = std::getenv("SEED"); env != nullptr && *env != '\0') {
    try {
      c.master_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidConfig, std::string("SEED is not an integer: ") + env);
    }
  }
  return c;
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string v; std::getline(ss, v, ',');)
    if (!v.empty()) out.push_back(v);
  return out;
}

struct SimulateArgs {
  std::string kind = "mse";
  std::string config;
  std::string snr;
  int trials = 0;
  std::string out;
  std::string format = "csv";
  int threads = 0;
  std::string decoder = "mmse";
  std::string sweep;
  std::string values;
  std::string boundary = "renormalize";
  bool online = false;
  bool timing = false;
};

int run_simulate(const SimulateArgs& a) {
  SweepSpec spec;
  spec.base = load_with_seed(a.config);
  if (a.trials > 0) spec.base.trials = a.trials;
  spec.metrics = a.kind == "ber" ? ber_metrics() : mse_metrics();
  spec.decoder = decoder_from_string(a.decoder);
  spec.timing = a.timing;
  spec.estimator.online = a.online;
  if (a.boundary == "hold-edge") spec.estimator.boundary = BoundaryPolicy::HoldEdge;
  else if (a.boundary != "renormalize")
    throw Error(ErrorKind::InvalidConfig, "unknown boundary policy '" + a.boundary + "'");

  if (a.sweep.empty() || a.sweep == "snr_db") {
    spec.variable = SweepVariable::SnrDb;
    const std::string range = !a.values.empty() ? a.values : a.snr.empty() ? "0:40:5" : a.snr;
    if (a.values.find(',') != std::string::npos) {
      spec.values = split_values(a.values);
    } else {
      for (double v : parse_range(range)) spec.values.push_back(format_double(v));
    }
  } else {
    spec.variable = sweep_variable_from_string(a.sweep);
    spec.values = split_values(a.values);
    if (!a.snr.empty()) {
      const auto snr = parse_range(a.snr);
      if (snr.size() != 1)
        throw Error(ErrorKind::InvalidConfig, "--snr must be a single value when sweeping " + a.sweep);
      spec.base.sigma_n_sq = snr_db_to_noise_var(snr.front());
    }
  }
  const OutputFormat format = a.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (a.format != "json" && a.format != "csv")
    throw Error(ErrorKind::InvalidConfig, "unknown format '" + a.format + "'");

  std::vector<MetricsRecord> done;
  try {
    run_sweep(spec, a.threads, [&](const MetricsRecord& r) { done.push_back(r); });
  } catch (const Error&) {
    emit(done, format, a.out);
    throw;
  }
  emit(done, format, a.out);
  return 0;
}

CrlbProblem problem_from_json(const nlohmann::json& j) {
  try {
    const auto& rows = j.at("h");
    CMatrix h(rows.size(), rows.at(0).size());
    for (Eigen::Index k = 0; k < h.rows(); ++k)
      for (Eigen::Index l = 0; l < h.cols(); ++l)
        h(k, l) = cplx(rows.at(k).at(l).at(0).get<double>(), rows.at(k).at(l).at(1).get<double>());
    RVector psi = RVector::Zero(h.cols());
    if (j.contains("psi_ref"))
      for (Eigen::Index l = 0; l < h.cols(); ++l) psi(l) = j.at("psi_ref").at(l).get<double>();
    return make_crlb_problem(h, psi, j.at("sigma_n_sq").get<double>(),
                             j.value("sigma_dphi_sq", 0.0), j.value("sigma_dpsi_sq", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("problem JSON: ") + e.what());
  }
}

int run_crlb(const std::string& config_path, const std::string& problem_path,
             const std::string& out_path) {
  CrlbProblem p;
  if (!problem_path.empty()) {
    std::ifstream in(problem_path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + problem_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidConfig, e.what());
    }
    p = problem_from_json(j);
  } else {
    const SystemConfig c = load_with_seed(config_path);
    RandomStream rng(trial_seed(c.master_seed, 0, 0, StreamId::Problem));
    const CMatrix h = sample_channel(c.n_r, c.n_t, rng);
    RVector psi(c.n_t);
    for (int l = 0; l < c.n_t; ++l) psi(l) = rng.uniform(-kPi, kPi);
    p = make_crlb_problem(h, psi, c.sigma_n_sq, c.sigma_dphi_sq, c.sigma_dpsi_sq);
  }
  const RVector full = fisher_information(p).crlb;
  const RVector low = crlb_low_snr(p);
  RVector high = RVector::Constant(full.size(), std::nan(""));
  try {
    high = crlb_high_snr(p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularCovariance) throw;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + out_path);
  out << "q,crlb_oneshot,crlb_low_snr,crlb_high_snr\n";
  for (Eigen::Index q = 0; q < full.size(); ++q)
    out << q + 1 << ',' << format_double(full(q)) << ',' << format_double(low(q)) << ','
        << format_double(high(q)) << '\n';
  return 0;
}

int run_complexity(int nr, int nt, int lw, double cm, double rate, double lf,
                   const std::string& out_path) {
  const int l_c = static_cast<int>(std::lround(nt / rate));
  const ComplexityBreakdown b = complexity_breakdown(nr, nt, l_c, l_c - nt, lf, lw, cm);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + out_path);
  out << "section,name,value\n";
  auto row = [&](std::string_view section, const std::string& name, double v) {
    out << section << ',' << name << ',' << format_double(v) << '\n';
  };
  row("breakdown", "amp_mul", b.amp_mul);
  row("breakdown", "amp_add", b.amp_add);
  row("breakdown", "wlls_mul", b.wlls_mul);
  row("breakdown", "wlls_add", b.wlls_add);
  row("breakdown", "wiener_mul", b.wiener_mul);
  row("breakdown", "wiener_add", b.wiener_add);
  row("breakdown", "hhat_mul", b.hhat_mul);
  row("breakdown", "hhat_add", b.hhat_add);
  row("breakdown", "total", b.total);
  for (int taps : {5, 50})
    for (int n : {2, 4, 8})
      row("table", "WLLS-Wiener L_W=" + std::to_string(taps) + " " + std::to_string(n) + "x" +
                       std::to_string(n),
          table_complexity(n, taps, cm).total);
  for (const auto& lit : literature_complexity()) {
    const std::string name = std::string(lit.algorithm) + " (" + std::string(lit.source) + ")";
    row("table", name + " 2x2", lit.at_2x2);
    row("table", name + " 4x4", lit.at_4x4);
    row("table", name + " 8x8", lit.at_8x8);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pilot-aided joint phase and channel estimation for MIMO links"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep");
  simulate->add_option("kind", sim.kind, "mse or ber")->required()->check(CLI::IsMember({"mse", "ber"}));
  simulate->add_option("--config", sim.config, "system config JSON");
  simulate->add_option("--snr", sim.snr, "SNR range start:stop:step in dB, or one value (default 0:40:5; with --sweep, one value overriding the config)");
  simulate->add_option("--trials", sim.trials, "trials per sweep point (overrides config)");
  simulate->add_option("--out", sim.out, "output file")->required();
  simulate->add_option("--format", sim.format, "csv or json");
  simulate->add_option("--threads", sim.threads, "OpenMP threads (0 = runtime default)");
  simulate->add_option("--decoder", sim.decoder, "mmse or mld");
  simulate->add_option("--sweep", sim.sweep,
                       "snr_db, sigma_delta_sq, pilot_rate, modulation or antennas");
  simulate->add_option("--values", sim.values, "comma-separated sweep values");
  simulate->add_option("--boundary", sim.boundary, "renormalize or hold-edge");
  simulate->add_flag("--online", sim.online, "online amplitude and channel averaging");
  simulate->add_flag("--timing", sim.timing, "fill the seconds column with wall time");

  std::string crlb_config, crlb_problem, crlb_out;
  auto* crlb = app.add_subcommand("crlb", "Per-parameter bounds for one problem");
  auto* crlb_cfg_opt = crlb->add_option("--config", crlb_config, "config JSON; draws H and psi from the seed");
  crlb->add_option("--problem", crlb_problem, "problem JSON with h, psi_ref and variances")
      ->excludes(crlb_cfg_opt);
  crlb->add_option("--out", crlb_out, "output CSV")->required();

  int nr = 2, nt = 2, lw = 50;
  double cm = 1.0, rate = 0.1, lf = 1e5;
  std::string cx_out;
  auto* complexity = app.add_subcommand("complexity", "Per-symbol operation counts");
  complexity->add_option("--nr", nr)->check(CLI::PositiveNumber);
  complexity->add_option("--nt", nt)->check(CLI::PositiveNumber);
  complexity->add_option("--lw", lw)->check(CLI::NonNegativeNumber);
  complexity->add_option("--cm", cm, "multiplication weight")->check(CLI::PositiveNumber);
  complexity->add_option("--pilot-rate", rate)->check(CLI::Range(1e-6, 1.0));
  complexity->add_option("--lf", lf, "frame length")->check(CLI::PositiveNumber);
  complexity->add_option("--out", cx_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*crlb) return run_crlb(crlb_config, crlb_problem, crlb_out);
    if (*complexity) return run_complexity(nr, nt, lw, cm, rate, lf, cx_out);
  } catch (const Error& e) {
    std::cerr << "pnest: " << e.what() << '\n';
    return e.is_numerical() ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "pnest: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
