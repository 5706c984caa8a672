#include "pnest/harness.hpp"

#include "pnest/airsim.hpp"
#include "pnest/baseline.hpp"
#include "pnest/crlb.hpp"
#include "pnest/errors.hpp"
#include "pnest/modem.hpp"
#include "pnest/rng.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pnest {

namespace {

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "phase_mse_oneshot", "phase_mse_wiener", "channel_mse",   "channel_mse_baseline",
    "ber_proposed",      "ber_perfect_csi",  "ber_baseline",  "crlb_oneshot",
    "crlb_wiener",       "crlb_low_snr",     "crlb_high_snr"};

constexpr int idx(Metric m) { return static_cast<int>(m); }

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorKind::InvalidConfig, "not a number: '" + text + "'");
  return x;
}

int parse_int(const std::string& text) {
  int x = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorKind::InvalidConfig, "not an integer: '" + text + "'");
  return x;
}

// Mean squared residual after removing each row's circular-mean offset.
double debiased_phase_mse(const RMatrix& estimate, const RMatrix& truth) {
  double acc = 0.0;
  for (Eigen::Index q = 0; q < estimate.rows(); ++q) {
    RVector d(estimate.cols());
    cplx mean = 0.0;
    for (Eigen::Index i = 0; i < estimate.cols(); ++i) {
      d(i) = wrap_to_pi(estimate(q, i) - truth(q, i));
      mean += unit_phasor(d(i));
    }
    const double bias = std::arg(mean);
    for (Eigen::Index i = 0; i < estimate.cols(); ++i) {
      const double r = wrap_to_pi(d(i) - bias);
      acc += r * r;
    }
  }
  return acc / static_cast<double>(estimate.size());
}

bool any_of(const MetricSet& set, std::initializer_list<Metric> ms) {
  for (Metric m : ms)
    if (set[idx(m)]) return true;
  return false;
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::SnrDb: return "snr_db";
    case SweepVariable::SigmaDeltaSq: return "sigma_delta_sq";
    case SweepVariable::PilotRate: return "pilot_rate";
    case SweepVariable::Modulation: return "modulation";
    case SweepVariable::Antennas: return "antennas";
  }
  return "?";
}

SweepVariable sweep_variable_from_string(std::string_view name) {
  for (auto v : {SweepVariable::SnrDb, SweepVariable::SigmaDeltaSq, SweepVariable::PilotRate,
                 SweepVariable::Modulation, SweepVariable::Antennas})
    if (to_string(v) == name) return v;
  throw Error(ErrorKind::InvalidConfig, "unknown sweep variable '" + std::string(name) + "'");
}

std::string_view to_string(Metric m) { return kMetricNames[idx(m)]; }

Metric metric_from_string(std::string_view name) {
  for (int i = 0; i < kMetricCount; ++i)
    if (kMetricNames[i] == name) return static_cast<Metric>(i);
  throw Error(ErrorKind::InvalidConfig, "unknown metric '" + std::string(name) + "'");
}

MetricSet metric_set(std::initializer_list<Metric> metrics) {
  MetricSet s{};
  for (Metric m : metrics) s[idx(m)] = true;
  return s;
}

MetricSet mse_metrics() {
  return metric_set({Metric::PhaseMseOneshot, Metric::PhaseMseWiener, Metric::ChannelMse,
                     Metric::ChannelMseBaseline, Metric::CrlbOneshot, Metric::CrlbWiener,
                     Metric::CrlbLowSnr, Metric::CrlbHighSnr});
}

MetricSet ber_metrics() {
  return metric_set({Metric::BerProposed, Metric::BerPerfectCsi, Metric::BerBaseline});
}

SystemConfig apply_sweep_value(const SystemConfig& base, SweepVariable variable,
                               const std::string& value) {
  SystemConfig c = base;
  switch (variable) {
    case SweepVariable::SnrDb:
      c.sigma_n_sq = snr_db_to_noise_var(parse_double(value));
      break;
    case SweepVariable::SigmaDeltaSq:
      c.sigma_dphi_sq = c.sigma_dpsi_sq = parse_double(value);
      break;
    case SweepVariable::PilotRate: {
      const double rate = parse_double(value);
      if (!(rate > 0.0 && rate <= 1.0)) throw Error(ErrorKind::InvalidConfig, "pilot rate out of (0, 1]");
      const int l_c = static_cast<int>(std::lround(c.n_t / rate));
      c.l_d = l_c - c.n_t;
      break;
    }
    case SweepVariable::Modulation:
      c.modulation = modulation_from_string(value);
      break;
    case SweepVariable::Antennas: {
      const auto x = value.find('x');
      if (x == std::string::npos) throw Error(ErrorKind::InvalidConfig, "antennas must be <n_t>x<n_r>");
      const double rate = static_cast<double>(base.n_t) / (base.n_t + base.l_d);
      c.n_t = parse_int(value.substr(0, x));
      c.n_r = parse_int(value.substr(x + 1));
      c.l_d = static_cast<int>(std::lround(c.n_t / rate)) - c.n_t;
      break;
    }
  }
  c.validate();
  return c;
}

TrialMetrics run_trial(const SystemConfig& config, std::uint64_t sweep_index,
                       std::uint64_t trial_index, const TrialOptions& options) {
  const MetricSet& want = options.metrics;
  const std::uint64_t seed = config.master_seed;
  RandomStream channel_rng(trial_seed(seed, sweep_index, trial_index, StreamId::Channel));
  RandomStream phase_rng(trial_seed(seed, sweep_index, trial_index, StreamId::Phase));
  RandomStream data_rng(trial_seed(seed, sweep_index, trial_index, StreamId::Data));
  RandomStream noise_rng(trial_seed(seed, sweep_index, trial_index, StreamId::Noise));

  const FramePlan plan = make_frame_plan(config);
  ChannelRealization truth;
  truth.h = sample_channel(config.n_r, config.n_t, channel_rng);
  PhaseWalks walks = sample_phase_walks(config, plan, phase_rng);
  truth.phi = std::move(walks.phi);
  truth.psi = std::move(walks.psi);
  truth.beta = std::move(walks.beta);
  const TransmitFrame tx = make_transmit_frame(config, plan, data_rng);
  const ReceivedFrame rx =
      transmit(truth.h, truth.phi, truth.psi, tx.s, config.sigma_n_sq, &noise_rng);

  TrialMetrics out;
  auto set = [&](Metric m, double v) {
    out.value[idx(m)] = v;
    out.present[idx(m)] = true;
  };

  const bool need_estimate =
      any_of(want, {Metric::PhaseMseOneshot, Metric::PhaseMseWiener, Metric::ChannelMse,
                    Metric::BerProposed});
  EstimateBundle est;
  if (need_estimate) {
    try {
      est = estimate_frame(rx.y, plan, config, options.estimator);
    } catch (const Error& e) {
      if (!e.is_numerical()) throw;
      out.dropped = true;
      return out;
    }
  }

  if (any_of(want, {Metric::PhaseMseOneshot, Metric::PhaseMseWiener})) {
    RMatrix truth_at_ref(truth.beta.rows(), plan.n_c);
    for (int i = 0; i < plan.n_c; ++i) truth_at_ref.col(i) = truth.beta.col(plan.column(plan.ref_index[i]));
    if (want[idx(Metric::PhaseMseOneshot)])
      set(Metric::PhaseMseOneshot, debiased_phase_mse(est.beta_hat, truth_at_ref));
    if (want[idx(Metric::PhaseMseWiener)])
      set(Metric::PhaseMseWiener, debiased_phase_mse(est.beta_smooth, truth_at_ref));
  }

  const bool need_baseline = any_of(want, {Metric::ChannelMseBaseline, Metric::BerBaseline});
  BaselineEstimate dae;
  if (need_baseline) dae = dae_estimate(rx.y, plan, pilot_block(config.n_t));

  if (any_of(want, {Metric::ChannelMse, Metric::ChannelMseBaseline})) {
    double acc = 0.0;
    double acc_dae = 0.0;
    for (int m = 1; m <= plan.payload(); ++m) {
      const int col = plan.column(m);
      const CMatrix ref = truth.equivalent_channel(col);
      if (want[idx(Metric::ChannelMse)]) acc += (est.equivalent_channel(col) - ref).squaredNorm();
      if (need_baseline) acc_dae += (dae.at_column(col, plan) - ref).squaredNorm();
    }
    const double n = static_cast<double>(plan.payload()) * config.n_r * config.n_t;
    if (want[idx(Metric::ChannelMse)]) set(Metric::ChannelMse, acc / n);
    if (want[idx(Metric::ChannelMseBaseline)]) set(Metric::ChannelMseBaseline, acc_dae / n);
  }

  if (any_of(want, {Metric::BerProposed, Metric::BerPerfectCsi, Metric::BerBaseline})) {
    const Constellation& c = constellation(config.modulation);
    std::size_t err_prop = 0, err_perf = 0, err_base = 0;
    std::size_t bit = 0;
    auto decode = [&](const CVector& y, const CMatrix& h) {
      return options.decoder == Decoder::MMSE ? mmse_decode(y, h, config.sigma_n_sq, c)
                                              : mld_decode(y, h, c);
    };
    auto count = [&](const DecodeResult& r, std::size_t offset) {
      std::size_t errs = 0;
      for (int l = 0; l < config.n_t; ++l) {
        const unsigned label = c.labels[r.indices[l]];
        for (int b = c.bits_per_symbol - 1; b >= 0; --b) {
          errs += ((label >> b) & 1u) != tx.bits[offset++];
        }
      }
      return errs;
    };
    for (int m : tx.data_m) {
      const int col = plan.column(m);
      const CVector y = rx.y.col(col);
      try {
        if (want[idx(Metric::BerProposed)]) err_prop += count(decode(y, est.equivalent_channel(col)), bit);
        if (want[idx(Metric::BerPerfectCsi)]) err_perf += count(decode(y, truth.equivalent_channel(col)), bit);
        if (want[idx(Metric::BerBaseline)]) err_base += count(decode(y, dae.at_column(col, plan)), bit);
      } catch (const Error& e) {
        if (!e.is_numerical()) throw;
        out = TrialMetrics{};
        out.dropped = true;
        return out;
      }
      bit += static_cast<std::size_t>(config.n_t) * c.bits_per_symbol;
    }
    const double nbits = static_cast<double>(tx.bits.size());
    if (want[idx(Metric::BerProposed)]) set(Metric::BerProposed, err_prop / nbits);
    if (want[idx(Metric::BerPerfectCsi)]) set(Metric::BerPerfectCsi, err_perf / nbits);
    if (want[idx(Metric::BerBaseline)]) set(Metric::BerBaseline, err_base / nbits);
  }

  if (any_of(want, {Metric::CrlbOneshot, Metric::CrlbWiener, Metric::CrlbLowSnr, Metric::CrlbHighSnr})) {
    const CrlbProblem problem =
        make_crlb_problem(truth.h, truth.psi.col(plan.column(plan.ref_index.front())),
                          config.sigma_n_sq, config.sigma_dphi_sq, config.sigma_dpsi_sq);
    auto attempt = [&](Metric m, auto&& fn) {
      try {
        set(m, fn());
      } catch (const Error& e) {
        if (!e.is_numerical()) throw;
      }
    };
    if (any_of(want, {Metric::CrlbOneshot, Metric::CrlbWiener})) {
      std::optional<RVector> bound;
      try {
        bound = fisher_information(problem).crlb;
      } catch (const Error& e) {
        if (!e.is_numerical()) throw;
      }
      if (bound && want[idx(Metric::CrlbOneshot)]) set(Metric::CrlbOneshot, bound->mean());
      if (bound && want[idx(Metric::CrlbWiener)]) {
        const RVector pw = inter_group_process_variance(config, plan);
        attempt(Metric::CrlbWiener, [&] {
          double acc = 0.0;
          for (Eigen::Index q = 0; q < bound->size(); ++q) acc += wiener_mse_bound((*bound)(q), pw(q));
          return acc / static_cast<double>(bound->size());
        });
      }
    }
    if (want[idx(Metric::CrlbLowSnr)]) attempt(Metric::CrlbLowSnr, [&] { return crlb_low_snr(problem).mean(); });
    if (want[idx(Metric::CrlbHighSnr)]) attempt(Metric::CrlbHighSnr, [&] { return crlb_high_snr(problem).mean(); });
  }
  return out;
}

const MetricSummary* MetricsRecord::find(Metric m) const {
  for (const auto& s : metrics)
    if (s.metric == m) return &s;
  return nullptr;
}

std::vector<MetricSummary> aggregate(const std::vector<TrialMetrics>& trials,
                                     const MetricSet& metrics) {
  std::vector<MetricSummary> out;
  for (int k = 0; k < kMetricCount; ++k) {
    if (!metrics[k]) continue;
    double sum = 0.0;
    int n = 0;
    for (const auto& t : trials) {
      if (t.dropped || !t.present[k]) continue;
      sum += t.value[k];
      ++n;
    }
    MetricSummary s{static_cast<Metric>(k)};
    s.trials = n;
    if (n == 0) {
      s.mean = std::nan("");
      s.stderr_ = std::nan("");
      out.push_back(s);
      continue;
    }
    s.mean = sum / n;
    double ss = 0.0;
    for (const auto& t : trials) {
      if (t.dropped || !t.present[k]) continue;
      const double d = t.value[k] - s.mean;
      ss += d * d;
    }
    s.stderr_ = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    out.push_back(s);
  }
  return out;
}

namespace {

std::vector<MetricsRecord> sweep_impl(const SweepSpec& spec, bool parallel, int threads,
                                      const RecordSink& sink) {
  if (spec.values.empty()) throw Error(ErrorKind::InvalidConfig, "sweep has no values");
  // Validate every point before spending time on any of them.
  std::vector<SystemConfig> configs;
  for (const auto& v : spec.values) configs.push_back(apply_sweep_value(spec.base, spec.variable, v));

  const TrialOptions options{spec.metrics, spec.decoder, spec.estimator};
  std::vector<MetricsRecord> records;
  for (std::size_t s = 0; s < configs.size(); ++s) {
    const SystemConfig& config = configs[s];
    const int n = config.trials;
    std::vector<TrialMetrics> results(n);
    const auto start = std::chrono::steady_clock::now();
    if (parallel) {
      const int nthreads = threads > 0 ? threads : omp_get_max_threads();
      std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
      for (int t = 0; t < n; ++t) {
        try {
          results[t] = run_trial(config, s, static_cast<std::uint64_t>(t), options);
        } catch (...) {
#pragma omp critical(pnest_sweep_failure)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
    } else {
      for (int t = 0; t < n; ++t) results[t] = run_trial(config, s, static_cast<std::uint64_t>(t), options);
    }
    MetricsRecord rec;
    rec.sweep_value = spec.values[s];
    rec.metrics = aggregate(results, spec.metrics);
    if (spec.timing)
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool any = false;
    for (const auto& m : rec.metrics) any = any || m.trials > 0;
    if (!any)
      throw Error(ErrorKind::SingularSystem,
                  "every trial failed numerically at " + std::string(to_string(spec.variable)) + " = " +
                      spec.values[s]);
    if (sink) sink(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<MetricsRecord> run_sweep(const SweepSpec& spec, int threads, const RecordSink& sink) {
  return sweep_impl(spec, true, threads, sink);
}

std::vector<MetricsRecord> run_sweep_serial(const SweepSpec& spec, const RecordSink& sink) {
  return sweep_impl(spec, false, 0, sink);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string to_csv(const std::vector<MetricsRecord>& records) {
  std::string out = "sweep_value,metric,mean,stderr,trials,seconds\n";
  for (const auto& r : records) {
    for (const auto& m : r.metrics) {
      out += r.sweep_value;
      out += ',';
      out += to_string(m.metric);
      out += ',' + format_double(m.mean) + ',' + format_double(m.stderr_) + ',' +
             std::to_string(m.trials) + ',' + format_double(r.wall_seconds) + '\n';
    }
  }
  return out;
}

nlohmann::json to_json(const std::vector<MetricsRecord>& records) {
  // Non-finite values have no JSON number form and travel as strings.
  auto number = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return format_double(x);
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : records) {
    for (const auto& m : r.metrics) {
      rows.push_back({{"sweep_value", r.sweep_value},
                      {"metric", std::string(to_string(m.metric))},
                      {"mean", number(m.mean)},
                      {"stderr", number(m.stderr_)},
                      {"trials", m.trials},
                      {"seconds", number(r.wall_seconds)}});
    }
  }
  return rows;
}

std::vector<MetricsRecord> records_from_json(const nlohmann::json& j) {
  auto number = [](const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    const std::string s = v.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    return parse_double(s);
  };
  std::vector<MetricsRecord> out;
  try {
    for (const auto& row : j) {
      const std::string value = row.at("sweep_value").get<std::string>();
      if (out.empty() || out.back().sweep_value != value) {
        out.push_back(MetricsRecord{value, {}, number(row.at("seconds"))});
      }
      MetricSummary s{metric_from_string(row.at("metric").get<std::string>())};
      s.mean = number(row.at("mean"));
      s.stderr_ = number(row.at("stderr"));
      s.trials = row.at("trials").get<int>();
      out.back().metrics.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("metrics JSON: ") + e.what());
  }
  return out;
}

void emit(const std::vector<MetricsRecord>& records, OutputFormat format,
          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  if (format == OutputFormat::Csv) out << to_csv(records);
  else out << to_json(records).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() == 1) return {parse_double(parts[0])};
  if (parts.size() != 3) throw Error(ErrorKind::InvalidConfig, "range must be start:stop:step");
  const double a = parse_double(parts[0]), b = parse_double(parts[1]), step = parse_double(parts[2]);
  if (!(step > 0.0) || b < a) throw Error(ErrorKind::InvalidConfig, "bad range '" + text + "'");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((b - a) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(a + i * step);
  return out;
}

std::optional<double> threshold_crossing(const std::vector<double>& snr_db,
                                         const std::vector<double>& ber, double target) {
  if (snr_db.size() != ber.size()) throw Error(ErrorKind::LengthMismatch, "snr/ber lengths differ");
  for (std::size_t i = 0; i + 1 < ber.size(); ++i) {
    if (!(ber[i] >= target && ber[i + 1] < target)) continue;
    if (ber[i + 1] <= 0.0) return snr_db[i + 1];
    const double y0 = std::log10(ber[i]), y1 = std::log10(ber[i + 1]), yt = std::log10(target);
    return snr_db[i] + (yt - y0) / (y1 - y0) * (snr_db[i + 1] - snr_db[i]);
  }
  return std::nullopt;
}

}  // namespace pnest
