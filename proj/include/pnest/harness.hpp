#pragma once

#include "pnest/config.hpp"
#include "pnest/decoders.hpp"
#include "pnest/estimator.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pnest {

enum class SweepVariable { SnrDb, SigmaDeltaSq, PilotRate, Modulation, Antennas };

std::string_view to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(std::string_view name);

enum class Metric {
  PhaseMseOneshot,
  PhaseMseWiener,
  ChannelMse,
  ChannelMseBaseline,
  BerProposed,
  BerPerfectCsi,
  BerBaseline,
  CrlbOneshot,
  CrlbWiener,
  CrlbLowSnr,
  CrlbHighSnr,
};
inline constexpr int kMetricCount = 11;

std::string_view to_string(Metric m);
Metric metric_from_string(std::string_view name);

using MetricSet = std::array<bool, kMetricCount>;
MetricSet metric_set(std::initializer_list<Metric> metrics);
MetricSet mse_metrics();
MetricSet ber_metrics();

struct SweepSpec {
  SystemConfig base;
  SweepVariable variable = SweepVariable::SnrDb;
  std::vector<std::string> values;
  MetricSet metrics = mse_metrics();
  Decoder decoder = Decoder::MMSE;
  EstimatorOptions estimator;
  bool timing = false;
};

/// Applies one sweep value to the base config. Pilot-rate and antenna values
/// keep every other setting; the antenna form is "<n_t>x<n_r>" and keeps the
/// base pilot rate. Throws Error{InvalidConfig} / Error{NonIntegerCellCount}.
SystemConfig apply_sweep_value(const SystemConfig& base, SweepVariable variable,
                               const std::string& value);

struct TrialMetrics {
  std::array<double, kMetricCount> value{};
  MetricSet present{};
  bool dropped = false;  ///< estimator hit a numerical failure
};

struct TrialOptions {
  MetricSet metrics = mse_metrics();
  Decoder decoder = Decoder::MMSE;
  EstimatorOptions estimator;
};

/// One frame simulated, estimated and scored. A numerical failure inside the
/// estimator marks the trial dropped; bound metrics that are undefined for the
/// configuration (zero innovation variance) are simply absent.
TrialMetrics run_trial(const SystemConfig& config, std::uint64_t sweep_index,
                       std::uint64_t trial_index, const TrialOptions& options);

struct MetricSummary {
  Metric metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
};

struct MetricsRecord {
  std::string sweep_value;
  std::vector<MetricSummary> metrics;
  double wall_seconds = 0.0;

  const MetricSummary* find(Metric m) const;
};

/// Aggregates in trial-index order.
std::vector<MetricSummary> aggregate(const std::vector<TrialMetrics>& trials,
                                     const MetricSet& metrics);

using RecordSink = std::function<void(const MetricsRecord&)>;

/// OpenMP over trials; threads <= 0 keeps the runtime default. Output is
/// independent of the thread count. Each finished record is also handed to
/// `sink` so callers can flush partial results.
std::vector<MetricsRecord> run_sweep(const SweepSpec& spec, int threads = 0,
                                     const RecordSink& sink = {});
/// Single-threaded reference with identical output.
std::vector<MetricsRecord> run_sweep_serial(const SweepSpec& spec, const RecordSink& sink = {});

enum class OutputFormat { Csv, Json };

std::string to_csv(const std::vector<MetricsRecord>& records);
nlohmann::json to_json(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> records_from_json(const nlohmann::json& j);
/// Throws Error{IoError}.
void emit(const std::vector<MetricsRecord>& records, OutputFormat format,
          const std::filesystem::path& path);

/// Shortest round-trip decimal form, independent of locale.
std::string format_double(double x);

/// Parses "a:b:c" (start:stop:step, inclusive) or a single value.
std::vector<double> parse_range(const std::string& text);

/// SNR at which a decreasing BER curve crosses `target`, interpolating
/// log10(BER) linearly between adjacent grid points.
std::optional<double> threshold_crossing(const std::vector<double>& snr_db,
                                         const std::vector<double>& ber, double target);

inline constexpr double kHdFecThreshold = 4.7e-3;

}  // namespace pnest
