#include "hetsched/harness.hpp"

#include "hetsched/errors.hpp"
#include "hetsched/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace hetsched {

namespace {

using nlohmann::json;

std::string format12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format12(v));
}

double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc;
}

// Stream index for scheduler randomness. Criterion-free schedulers share one
// index so their arrangement does not depend on the criterion column.
std::uint64_t scheduler_stream_index(Scheduler s, std::optional<Criterion> c) {
  const auto si = static_cast<std::uint64_t>(s);
  const auto ci = c ? static_cast<std::uint64_t>(*c) : std::uint64_t{63};
  return si * 64 + ci;
}

}  // namespace

std::string_view to_string(CapacityReport c) {
  return c == CapacityReport::kPerGroupAverage ? "per-group-average" : "total";
}

CapacityReport parse_capacity_report(std::string_view text) {
  if (text == "per-group-average") return CapacityReport::kPerGroupAverage;
  if (text == "total") return CapacityReport::kTotal;
  throw ConfigError("unknown capacity report '" + std::string(text) +
                    "' (per-group-average|total)");
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::kCsv ? "csv" : "json"; }

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  throw ConfigError("unknown output format '" + std::string(text) + "' (csv|json)");
}

std::vector<std::string> validate_spec(const ExperimentSpec& spec) {
  auto warnings = validate_scenario(spec.scenario);
  if (spec.schedulers.empty()) throw ConfigError("no schedulers listed");
  if (spec.criteria.empty()) throw ConfigError("no criteria listed");
  if (!(spec.outage_level > 0.0 && spec.outage_level < 1.0)) {
    throw ConfigError("outage_level must lie in (0,1)");
  }
  if (spec.exhaustive_limit < 1 || spec.exhaustive_limit > 30) {
    throw ConfigError("exhaustive_limit must lie in [1,30]");
  }
  const std::size_t k = spec.scenario.users.size();
  for (Scheduler s : spec.schedulers) {
    const bool exhaustive = s == Scheduler::kConventionalGrouping ||
                            s == Scheduler::kExhaustiveSelection ||
                            s == Scheduler::kExhaustiveGrouping;
    if (exhaustive && k > spec.exhaustive_limit) {
      throw ConfigError(std::string(to_string(s)) + ": combinatorial blow-up (" +
                        std::to_string(k) + " users exceeds the exhaustive limit of " +
                        std::to_string(spec.exhaustive_limit) + ")");
    }
  }
  if (spec.group_size > k) throw ConfigError("group_size exceeds the number of users");
  return warnings;
}

const OutageRecord& OutageSummary::find(Scheduler s, Criterion c, double snr_db) const {
  for (const auto& r : records) {
    if (r.scheduler == s && r.criterion == c && r.snr_db == snr_db) return r;
  }
  throw std::out_of_range("no record for " + std::string(to_string(s)) + "/" +
                          std::string(to_string(c)) + " at " + format12(snr_db) + " dB");
}

double outage_quantile(std::span<const double> samples, double level) {
  if (samples.empty()) throw std::invalid_argument("outage_quantile: no samples");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("outage_quantile: level must lie in (0,1)");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

double sample_se(const std::vector<double>& stats) {
  const double mean = sorted_sum(stats) / static_cast<double>(stats.size());
  double ss = 0.0;
  for (double v : stats) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(stats.size() - 1));
}

}  // namespace

double bootstrap_outage_se(std::span<const double> samples, double level, std::size_t resamples,
                           std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("bootstrap: no samples");
  if (resamples < 2) throw std::invalid_argument("bootstrap: need at least 2 resamples");
  auto rng = make_stream(seed, 0, 0, StreamPurpose::kBootstrap);
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  std::vector<double> draw(samples.size());
  std::vector<double> stats;
  stats.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& v : draw) v = samples[pick(rng)];
    stats.push_back(outage_quantile(draw, level));
  }
  return sample_se(stats);
}

double bootstrap_outage_difference_se(std::span<const double> a, std::span<const double> b,
                                      double level, std::size_t resamples, std::uint64_t seed) {
  if (a.empty() || a.size() != b.size()) {
    throw std::invalid_argument("bootstrap: paired samples must be nonempty and equally long");
  }
  if (resamples < 2) throw std::invalid_argument("bootstrap: need at least 2 resamples");
  auto rng = make_stream(seed, 0, 1, StreamPurpose::kBootstrap);
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  std::vector<double> da(a.size()), db(b.size());
  std::vector<double> stats;
  stats.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t j = pick(rng);
      da[i] = a[j];
      db[i] = b[j];
    }
    stats.push_back(outage_quantile(da, level) - outage_quantile(db, level));
  }
  return sample_se(stats);
}

unsigned resolve_thread_count() {
  if (const char* env = std::getenv("HETSCHED_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<unsigned>(n);
    throw ConfigError("HETSCHED_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double arrangement_capacity(const ChannelRealization& r, const GroupingArrangement& a,
                            PowerPolicy policy, double total_power, double noise_variance,
                            CapacityReport report) {
  if (a.groups.empty()) return 0.0;
  double total = 0.0;
  for (const auto& g : a.groups) {
    total += group_sum_capacity(r, g, policy, total_power, noise_variance);
  }
  if (report == CapacityReport::kTotal) return total;
  return total / static_cast<double>(a.groups.size());
}

double total_power_for(double snr_db, double noise_variance) {
  return std::pow(10.0, snr_db / 10.0) * noise_variance;
}

double criterion_snr_scale(double snr_db, int transmit_antennas) {
  return std::pow(10.0, snr_db / 10.0) / static_cast<double>(transmit_antennas);
}

OutageSummary run_experiment(const ExperimentSpec& spec, unsigned threads) {
  validate_spec(spec);
  const Scenario& sc = spec.scenario;
  const std::size_t n_snr = sc.snr_db.size();
  const std::size_t n_records = spec.schedulers.size() * spec.criteria.size() * n_snr;
  const std::size_t n_trials = sc.trials;

  std::vector<double> capacity(n_trials * n_records);
  std::vector<double> comparisons(n_trials * n_records);

  auto run_trial = [&](std::size_t trial) {
    const ChannelRealization r = generate_realization(sc, trial);
    // Arrangements shared across criterion columns and SNR points where they cannot differ.
    std::map<std::tuple<int, int, long>, GroupingArrangement> memo;
    std::size_t rec = 0;
    for (Scheduler s : spec.schedulers) {
      for (Criterion c : spec.criteria) {
        const std::optional<Criterion> used =
            uses_criterion(s) ? std::optional<Criterion>(c) : std::nullopt;
        for (std::size_t i = 0; i < n_snr; ++i, ++rec) {
          const double snr = sc.snr_db[i];
          const double p_t = total_power_for(snr, sc.noise_variance);
          const bool per_snr = depends_on_snr(s, c);
          const auto key = std::make_tuple(static_cast<int>(s), used ? static_cast<int>(*used) : -1,
                                           per_snr ? static_cast<long>(i) : -1L);
          auto it = memo.find(key);
          if (it == memo.end()) {
            auto rng = make_stream(sc.seed, trial, scheduler_stream_index(s, used),
                                   StreamPurpose::kScheduler);
            SchedulerOptions opt;
            opt.criterion = c;
            opt.snr_scale = criterion_snr_scale(snr, sc.transmit_antennas);
            opt.rng = &rng;
            opt.group_size = spec.group_size;
            opt.exhaustive_limit = spec.exhaustive_limit;
            opt.power_policy = spec.power_policy;
            opt.total_power = p_t;
            opt.noise_variance = sc.noise_variance;
            it = memo.emplace(key, run_scheduler(s, r, opt)).first;
          }
          capacity[trial * n_records + rec] = arrangement_capacity(
              r, it->second, spec.power_policy, p_t, sc.noise_variance, spec.capacity_report);
          comparisons[trial * n_records + rec] = static_cast<double>(it->second.comparisons);
        }
      }
    }
  };

  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(threads ? threads : resolve_thread_count(),
                                      static_cast<unsigned>(n_trials)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_trials) return;
      try {
        run_trial(t);
      } catch (const InfeasibleError& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(
              InfeasibleError("trial " + std::to_string(t) + ": " + e.what()));
        }
        next = n_trials;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_trials;
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  OutageSummary summary;
  std::size_t rec = 0;
  for (Scheduler s : spec.schedulers) {
    for (Criterion c : spec.criteria) {
      for (std::size_t i = 0; i < n_snr; ++i, ++rec) {
        OutageRecord out;
        out.scheduler = s;
        out.criterion = c;
        out.snr_db = sc.snr_db[i];
        out.trials = n_trials;
        out.samples.resize(n_trials);
        std::vector<double> comps(n_trials);
        for (std::size_t t = 0; t < n_trials; ++t) {
          out.samples[t] = capacity[t * n_records + rec];
          comps[t] = comparisons[t * n_records + rec];
        }
        out.outage_capacity = outage_quantile(out.samples, spec.outage_level);
        out.mean_capacity = sorted_sum(out.samples) / static_cast<double>(n_trials);
        out.comparisons_mean = sorted_sum(comps) / static_cast<double>(n_trials);
        summary.records.push_back(std::move(out));
      }
    }
  }
  return summary;
}

namespace {

constexpr std::array<std::string_view, 8> kPresetNames{
    "fig3", "fig4", "fig4-homogeneous", "fig4-mixed", "fig5", "fig6", "fig7", "fig8"};

std::vector<UserProfile> fixed_antennas(std::initializer_list<int> antennas) {
  std::vector<UserProfile> users;
  for (int a : antennas) {
    UserProfile u;
    u.antennas = a;
    users.push_back(u);
  }
  return users;
}

}  // namespace

std::span<const std::string_view> preset_names() { return kPresetNames; }

ExperimentSpec figure_preset(std::string_view name, const PresetOptions& options) {
  ExperimentSpec spec;
  spec.name = std::string(name);
  Scenario& sc = spec.scenario;
  const std::vector<Criterion> fig3_criteria{
      Criterion::kLargestPrincipalAngle, Criterion::kCollinearity, Criterion::kChordal,
      Criterion::kGeometricalAngle, Criterion::kGroupingOriented, Criterion::kRandom};

  if (name == "fig3") {
    sc.transmit_antennas = 6;
    sc.users = fixed_antennas({1, 1, 1, 2, 3, 4});
    spec.schedulers = {Scheduler::kConventionalGrouping, Scheduler::kExhaustiveGrouping};
    spec.criteria = fig3_criteria;
    // Pairs, as in the max-min grouping these criteria are plugged into.
    spec.group_size = 2;
  } else if (name == "fig4" || name == "fig4-homogeneous" || name == "fig4-mixed") {
    sc.transmit_antennas = 12;
    if (name == "fig4") {
      sc.users = fixed_antennas({1, 2, 3, 4, 5, 6});
    } else if (name == "fig4-homogeneous") {
      sc.users = fixed_antennas({2, 2, 2, 2, 2, 2});
    } else {
      sc.users = fixed_antennas({1, 1, 1, 2, 3, 4});
    }
    spec.schedulers = {Scheduler::kConventionalGrouping};
    spec.criteria = {Criterion::kLargestPrincipalAngle, Criterion::kGroupingOriented};
    spec.group_size = 2;
  } else if (name == "fig5") {
    sc.transmit_antennas = 12;
    sc.max_receive_antennas = 2;
    sc.users.assign(20, UserProfile{});
    spec.schedulers = {Scheduler::kGreedySelection};
    spec.criteria = {Criterion::kSelectionFull, Criterion::kSelectionSimplified,
                     Criterion::kLargestPrincipalAngle, Criterion::kProjectedNorm};
  } else if (name == "fig6") {
    sc.transmit_antennas = 12;
    sc.max_receive_antennas = 2;
    sc.users.assign(options.users.value_or(8), UserProfile{});
    sc.snr_db = {30.0};
    spec.schedulers = {Scheduler::kGreedySelection, Scheduler::kExhaustiveSelection};
    spec.criteria = {Criterion::kSelectionFull, Criterion::kSelectionSimplified,
                     Criterion::kGeometricalAngle};
  } else if (name == "fig7" || name == "fig8") {
    sc.transmit_antennas = 6;
    sc.users = fixed_antennas({1, 1, 1, 2, 3, 4});
    spec.schedulers = {Scheduler::kAlgorithm1, Scheduler::kAlgorithm2,
                       Scheduler::kConventionalGrouping};
    spec.criteria = {name == "fig7" ? Criterion::kSelectionSimplified
                                    : Criterion::kLargestPrincipalAngle};
    // floor(M_T / max M_Rk) users per conventional group.
    spec.group_size = 1;
  } else {
    std::string valid;
    for (auto n : kPresetNames) {
      if (!valid.empty()) valid += ", ";
      valid += n;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
  }
  if (options.users && name != "fig6") {
    throw ConfigError("--users only applies to fig6");
  }
  if (options.trials) sc.trials = *options.trials;
  if (options.seed) sc.seed = *options.seed;
  validate_spec(spec);
  return spec;
}

void write_csv(const OutageSummary& summary, std::ostream& out) {
  out << "scheduler,criterion,snr_db,outage_capacity,mean_capacity,trials,comparisons_mean\n";
  for (const auto& r : summary.records) {
    out << to_string(r.scheduler) << ',' << to_string(r.criterion) << ',' << format12(r.snr_db)
        << ',' << format12(r.outage_capacity) << ',' << format12(r.mean_capacity) << ','
        << r.trials << ',' << format12(r.comparisons_mean) << '\n';
  }
}

namespace {

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

json spec_json(const ExperimentSpec& spec) {
  const Scenario& sc = spec.scenario;
  json users = json::array();
  for (const auto& u : sc.users) {
    users.push_back({{"antennas", optional_json(u.antennas)},
                     {"distance", optional_json(u.distance)},
                     {"rx_correlation", optional_json(u.rx_correlation)},
                     {"tx_correlation", optional_json(u.tx_correlation)}});
  }
  json schedulers = json::array();
  for (auto s : spec.schedulers) schedulers.push_back(std::string(to_string(s)));
  json criteria = json::array();
  for (auto c : spec.criteria) criteria.push_back(std::string(to_string(c)));
  return {
      {"name", spec.name},
      {"scenario",
       {{"transmit_antennas", sc.transmit_antennas},
        {"users", users},
        {"noise_variance", sc.noise_variance},
        {"path_loss_exponent", sc.path_loss_exponent},
        {"reference_distance", sc.reference_distance},
        {"max_distance", sc.max_distance},
        {"max_receive_antennas", sc.max_receive_antennas},
        {"snr_db", sc.snr_db},
        {"trials", sc.trials},
        {"seed", sc.seed},
        {"redraw_per_trial", sc.redraw_per_trial}}},
      {"schedulers", schedulers},
      {"criteria", criteria},
      {"power_policy", std::string(to_string(spec.power_policy))},
      {"outage_level", spec.outage_level},
      {"group_size", spec.group_size},
      {"exhaustive_limit", spec.exhaustive_limit},
      {"capacity_report", std::string(to_string(spec.capacity_report))},
      {"output", spec.output},
      {"format", std::string(to_string(spec.format))},
  };
}

}  // namespace

void write_json(const ExperimentSpec& spec, const OutageSummary& summary, std::ostream& out) {
  json records = json::array();
  for (const auto& r : summary.records) {
    records.push_back({{"scheduler", std::string(to_string(r.scheduler))},
                       {"criterion", std::string(to_string(r.criterion))},
                       {"snr_db", round12(r.snr_db)},
                       {"outage_capacity", round12(r.outage_capacity)},
                       {"mean_capacity", round12(r.mean_capacity)},
                       {"trials", r.trials},
                       {"comparisons_mean", round12(r.comparisons_mean)}});
  }
  const json doc{{"spec", spec_json(spec)}, {"records", records}};
  out << doc.dump(2) << '\n';
}

void serialize_results(const ExperimentSpec& spec, const OutageSummary& summary,
                       std::ostream& fallback) {
  auto emit = [&](std::ostream& os) {
    if (spec.format == OutputFormat::kCsv) {
      write_csv(summary, os);
    } else {
      write_json(spec, summary, os);
    }
  };
  if (spec.output.empty()) {
    emit(fallback);
    return;
  }
  std::ofstream file(spec.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + spec.output + "' for writing");
  emit(file);
  file.flush();
  if (!file) throw std::runtime_error("failed writing '" + spec.output + "'");
}

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2); }

ExperimentSpec spec_from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    if (j.contains("spec")) j = j.at("spec");
    ExperimentSpec spec;
    spec.name = j.at("name").get<std::string>();
    const json& s = j.at("scenario");
    Scenario& sc = spec.scenario;
    sc.transmit_antennas = s.at("transmit_antennas").get<int>();
    for (const auto& u : s.at("users")) {
      UserProfile p;
      p.antennas = optional_from<int>(u.at("antennas"));
      p.distance = optional_from<double>(u.at("distance"));
      p.rx_correlation = optional_from<double>(u.at("rx_correlation"));
      p.tx_correlation = optional_from<double>(u.at("tx_correlation"));
      sc.users.push_back(p);
    }
    sc.noise_variance = s.at("noise_variance").get<double>();
    sc.path_loss_exponent = s.at("path_loss_exponent").get<double>();
    sc.reference_distance = s.at("reference_distance").get<double>();
    sc.max_distance = s.at("max_distance").get<double>();
    sc.max_receive_antennas = s.at("max_receive_antennas").get<int>();
    sc.snr_db = s.at("snr_db").get<std::vector<double>>();
    sc.trials = s.at("trials").get<std::size_t>();
    sc.seed = s.at("seed").get<std::uint64_t>();
    sc.redraw_per_trial = s.at("redraw_per_trial").get<bool>();
    for (const auto& name : j.at("schedulers")) {
      spec.schedulers.push_back(parse_scheduler(name.get<std::string>()));
    }
    for (const auto& name : j.at("criteria")) {
      spec.criteria.push_back(parse_criterion(name.get<std::string>()));
    }
    spec.power_policy = parse_power_policy(j.at("power_policy").get<std::string>());
    spec.outage_level = j.at("outage_level").get<double>();
    spec.group_size = j.at("group_size").get<std::size_t>();
    spec.exhaustive_limit = j.at("exhaustive_limit").get<std::size_t>();
    spec.capacity_report = parse_capacity_report(j.at("capacity_report").get<std::string>());
    spec.output = j.at("output").get<std::string>();
    spec.format = parse_output_format(j.at("format").get<std::string>());
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed spec JSON: ") + e.what());
  }
}

}  // namespace hetsched
