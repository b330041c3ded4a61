#pragma once

// Monte Carlo experiment engine: runs every (scheduler, criterion, SNR)
// combination over independent channel trials and reduces the per-trial
// capacities to outage statistics.

#include "hetsched/channel.hpp"
#include "hetsched/criteria.hpp"
#include "hetsched/precoding.hpp"
#include "hetsched/schedulers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hetsched {

enum class CapacityReport { kPerGroupAverage, kTotal };

std::string_view to_string(CapacityReport c);
CapacityReport parse_capacity_report(std::string_view text);

enum class OutputFormat { kCsv, kJson };

std::string_view to_string(OutputFormat f);
OutputFormat parse_output_format(std::string_view text);

struct ExperimentSpec {
  std::string name = "custom";
  Scenario scenario;
  std::vector<Scheduler> schedulers;
  std::vector<Criterion> criteria;
  PowerPolicy power_policy = PowerPolicy::kWaterfilling;
  double outage_level = 0.10;
  std::size_t group_size = 0;  // 0: largest feasible size
  std::size_t exhaustive_limit = kDefaultExhaustiveLimit;
  CapacityReport capacity_report = CapacityReport::kPerGroupAverage;
  std::string output;  // empty: standard output
  OutputFormat format = OutputFormat::kCsv;

  bool operator==(const ExperimentSpec&) const = default;
};

/// Throws ConfigError on an invalid spec; returns the scenario warnings.
std::vector<std::string> validate_spec(const ExperimentSpec& spec);

struct OutageRecord {
  Scheduler scheduler = Scheduler::kGreedySelection;
  Criterion criterion = Criterion::kSelectionSimplified;
  double snr_db = 0.0;
  double outage_capacity = 0.0;
  double mean_capacity = 0.0;
  std::size_t trials = 0;
  double comparisons_mean = 0.0;
  std::vector<double> samples;  // per-trial capacity, indexed by trial
};

struct OutageSummary {
  std::vector<OutageRecord> records;

  const OutageRecord& find(Scheduler s, Criterion c, double snr_db) const;
};

/// Linear interpolation between order statistics: h = (n - 1) * level.
double outage_quantile(std::span<const double> samples, double level);

/// Bootstrap standard error of the outage quantile.
double bootstrap_outage_se(std::span<const double> samples, double level, std::size_t resamples,
                           std::uint64_t seed);
/// Bootstrap standard error of outage(a) - outage(b) with trials resampled jointly.
double bootstrap_outage_difference_se(std::span<const double> a, std::span<const double> b,
                                      double level, std::size_t resamples, std::uint64_t seed);

/// Thread count from HETSCHED_THREADS, else the hardware concurrency.
unsigned resolve_thread_count();

/// Capacity the harness records for an arrangement at one SNR point.
double arrangement_capacity(const ChannelRealization& r, const GroupingArrangement& a,
                            PowerPolicy policy, double total_power, double noise_variance,
                            CapacityReport report);

/// P_T for an SNR point given in dB (P_T / noise variance).
double total_power_for(double snr_db, double noise_variance);
/// Per-mode SNR scale the selection criteria use: (P_T / noise) / M_T.
double criterion_snr_scale(double snr_db, int transmit_antennas);

OutageSummary run_experiment(const ExperimentSpec& spec, unsigned threads = 0);

struct PresetOptions {
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> users;  // fig6 pool size
};

std::span<const std::string_view> preset_names();
ExperimentSpec figure_preset(std::string_view name, const PresetOptions& options = {});

void write_csv(const OutageSummary& summary, std::ostream& out);
void write_json(const ExperimentSpec& spec, const OutageSummary& summary, std::ostream& out);
/// Writes to spec.output (or `out` when empty) in spec.format; I/O errors name the path.
void serialize_results(const ExperimentSpec& spec, const OutageSummary& summary,
                       std::ostream& fallback);

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(std::string_view text);

}  // namespace hetsched
