// Command-line front end: run configured or preset experiments, validate
// configs, and print the reference values computed by the oracle checks.

#include "hetsched/config.hpp"
#include "hetsched/errors.hpp"
#include "hetsched/harness.hpp"
#include "hetsched/oracle.hpp"
#include "hetsched/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>

namespace {

using namespace hetsched;

ComplexMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng)) / std::sqrt(2.0);
  }
  return m;
}

void print(const char* label, double v) { std::printf("%-28s %.12g\n", label, v); }

int check_quantile() {
  std::vector<double> s;
  for (int i = 1; i <= 100; ++i) s.push_back(i);
  print("quantile {1..100} @0.10", outage_quantile(s, 0.10));
  print("order-statistic oracle", oracle::order_statistic_quantile(s, 0.10));
  return 0;
}

int check_waterfill() {
  const std::vector<double> gains{1.0, 0.1};
  const auto p = waterfill(gains, 1.0);
  const auto q = oracle::waterfill_scan(gains, 1.0);
  print("closed form p1", p[0]);
  print("closed form p2", p[1]);
  print("mu scan p1", q[0]);
  print("mu scan p2", q[1]);
  return 0;
}

int check_geometrical() {
  auto rng = make_stream(1, 0, 0, StreamPurpose::kTest);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ComplexMatrix hk = random_matrix(rng, 2, 6);
    const ComplexMatrix hj = random_matrix(rng, 3, 6);
    const double a = geometrical_angle_cos2(hk, hj);
    const double b = geometrical_angle_cos2_determinant(hk, hj);
    worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
  }
  print("max relative difference", worst);
  return 0;
}

int check_selection() {
  auto rng = make_stream(1, 0, 1, StreamPurpose::kTest);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<ComplexMatrix> hs{random_matrix(rng, 1, 8), random_matrix(rng, 2, 8),
                                  random_matrix(rng, 2, 8)};
    const auto r = ChannelRealization::from_channels(hs, std::vector<double>{0.5, 0.3, 0.9});
    const std::vector<std::size_t> subset{0, 1};
    const double a = metric_selection_simplified(r, 2, subset);
    const double b = metric_selection_simplified_angle_form(r, 2, subset);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
  }
  print("max relative difference", worst);
  return 0;
}

int check_bounds_sandwich() {
  auto rng = make_stream(1, 0, 2, StreamPurpose::kTest);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<ComplexMatrix> hs{random_matrix(rng, 2, 6), random_matrix(rng, 1, 6),
                                        random_matrix(rng, 3, 6)};
    const auto r = ChannelRealization::from_channels(hs);
    const std::vector<std::size_t> members{0, 1, 2};
    for (std::size_t pos = 0; pos < 3; ++pos) {
      const auto b = capacity_bounds(r, members, pos, 100.0, 1.0);
      worst = std::min({worst, b.exact - b.lower, b.upper - b.exact});
    }
  }
  print("smallest slack (bits)", worst);
  return 0;
}

int check_partitions() {
  print("K=4 G=2 arrangements", static_cast<double>(enumerate_partitions(4, 2).size()));
  print("K=6 G=2 arrangements", static_cast<double>(enumerate_partitions(6, 2).size()));
  print("restricted growth K=6 G=2",
        static_cast<double>(oracle::restricted_growth_partitions(6, 2).size()));
  return 0;
}

int check_delta_ranking() {
  auto rng = make_stream(1, 0, 3, StreamPurpose::kTest);
  std::vector<ComplexMatrix> hs;
  for (int i = 0; i < 12; ++i) hs.push_back(random_matrix(rng, 1 + i % 2, 8));
  const auto r = ChannelRealization::from_channels(hs);
  const std::vector<std::size_t> subset{0, 1};
  const double scale = criterion_snr_scale(40.0, 8);
  std::vector<double> approx, exact;
  for (std::size_t k = 2; k < r.size(); ++k) {
    approx.push_back(metric_selection_full(r, k, subset, scale));
    exact.push_back(oracle::exact_delta_capacity(r, k, subset, scale).delta());
  }
  print("kendall tau (40 dB)", oracle::kendall_tau(approx, exact));
  return 0;
}

const std::map<std::string, std::function<int()>>& oracle_checks() {
  static const std::map<std::string, std::function<int()>> checks{
      {"quantile", check_quantile},
      {"waterfill", check_waterfill},
      {"geometrical-identity", check_geometrical},
      {"selection-identity", check_selection},
      {"bounds-sandwich", check_bounds_sandwich},
      {"partition-count", check_partitions},
      {"delta-ranking", check_delta_ranking},
  };
  return checks;
}

int run_spec(ExperimentSpec spec, const std::string& out, const std::string& format) {
  if (!out.empty()) spec.output = out;
  if (!format.empty()) spec.format = parse_output_format(format);
  for (const auto& w : validate_spec(spec)) std::cerr << "warning: " << w << '\n';
  const OutageSummary summary = run_experiment(spec);
  serialize_results(spec, summary, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous multiuser MIMO scheduling simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format;
  auto* simulate = app.add_subcommand("simulate", "Run the experiment described by a config file");
  simulate->add_option("config", config_path, "Config file")->required();
  simulate->add_option("--out", out_path, "Output path (default: config or stdout)");
  simulate->add_option("--format", format, "csv or json");

  std::string preset_name;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t users = 0;
  auto* preset = app.add_subcommand("preset", "Run a figure preset");
  preset->add_option("name", preset_name, "fig3 | fig4 | fig4-homogeneous | fig4-mixed | fig5 | fig6 | fig7 | fig8")
      ->required();
  auto* trials_opt = preset->add_option("--trials", trials, "Monte Carlo trials");
  auto* seed_opt = preset->add_option("--seed", seed, "RNG seed");
  auto* users_opt = preset->add_option("--users", users, "Pool size (fig6 only)");
  preset->add_option("--out", out_path, "Output path (default: stdout)");
  preset->add_option("--format", format, "csv or json");

  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("config", config_path, "Config file")->required();

  std::string check_name;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print reference values from an oracle check");
  oracle_cmd->add_option("check", check_name, "Check name (use 'list' to see all)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) return run_spec(load_config(config_path), out_path, format);
    if (*preset) {
      PresetOptions opt;
      if (*trials_opt) opt.trials = trials;
      if (*seed_opt) opt.seed = seed;
      if (*users_opt) opt.users = users;
      return run_spec(figure_preset(preset_name, opt), out_path, format);
    }
    if (*validate) {
      const ExperimentSpec spec = load_config(config_path);
      for (const auto& w : validate_spec(spec)) std::cout << "warning: " << w << '\n';
      std::cout << "ok: " << spec.scenario.users.size() << " users, "
                << spec.schedulers.size() * spec.criteria.size() * spec.scenario.snr_db.size()
                << " result rows\n";
      return 0;
    }
    if (*oracle_cmd) {
      const auto& checks = oracle_checks();
      if (check_name == "list") {
        for (const auto& [name, fn] : checks) std::cout << name << '\n';
        return 0;
      }
      const auto it = checks.find(check_name);
      if (it == checks.end()) throw ConfigError("unknown oracle check '" + check_name + "'");
      return it->second();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
