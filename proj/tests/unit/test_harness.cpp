#include "helpers.hpp"

#include "hetsched/config.hpp"
#include "hetsched/errors.hpp"
#include "hetsched/harness.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace hetsched;
using namespace hetsched::testing;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.name = "small";
  spec.scenario.transmit_antennas = 4;
  spec.scenario.users.assign(6, UserProfile{});
  spec.scenario.max_receive_antennas = 2;
  spec.scenario.snr_db = {0.0, 20.0, 40.0};
  spec.scenario.trials = 40;
  spec.scenario.seed = 11;
  spec.schedulers = {Scheduler::kGreedySelection, Scheduler::kAlgorithm2, Scheduler::kExhaustiveSelection};
  spec.criteria = {Criterion::kSelectionSimplified, Criterion::kSelectionFull};
  return spec;
}

std::string csv_of(const OutageSummary& s) {
  std::ostringstream out;
  write_csv(s, out);
  return out.str();
}

const char* kConfig = R"(# two fixed users and three random ones
[scenario]
transmit_antennas = 4
snr_db = 10 30
trials = 25
seed = 99
path_loss_exponent = 3.5
redraw_per_trial = false

[users]
user = 2 300 0.2 random   ; inline comment
user = random random 0 0
random = 3

[experiment]
name = demo
schedulers = greedy-selection, algorithm1-group-min
criteria = selection-simplified grouping-oriented
power_policy = equal
outage_level = 0.05
group_size = auto
capacity_report = total
format = json
)";

}  // namespace

TEST_CASE("outage quantile examples") {
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 1.0);
  CHECK(outage_quantile(s, 0.10) == doctest::Approx(10.9));
  std::vector<double> shuffled = s;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(outage_quantile(shuffled, 0.10) == doctest::Approx(10.9));
  const std::vector<double> constant(17, 3.25);
  CHECK(outage_quantile(constant, 0.10) == 3.25);
  const std::vector<double> pair{0.0, 10.0};
  CHECK(outage_quantile(pair, 0.5) == doctest::Approx(5.0));
  CHECK_THROWS(outage_quantile(std::vector<double>{}, 0.1));
  CHECK_THROWS(outage_quantile(pair, 1.0));
}

TEST_CASE("bootstrap standard errors") {
  auto rng = test_rng(1);
  std::normal_distribution<double> n(10.0, 2.0);
  std::vector<double> a(500), b(500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = n(rng);
    b[i] = a[i] + 0.1 * n(rng);
  }
  const double se = bootstrap_outage_se(a, 0.1, 400, 3);
  CHECK(se > 0.0);
  CHECK(se < 1.0);
  CHECK(se == bootstrap_outage_se(a, 0.1, 400, 3));
  // Strongly paired samples: the difference is far less noisy than either quantile.
  CHECK(bootstrap_outage_difference_se(a, b, 0.1, 400, 3) < se);
  CHECK(bootstrap_outage_se(std::vector<double>(50, 1.0), 0.1, 100, 1) == 0.0);
}

TEST_CASE("SNR conversions") {
  CHECK(total_power_for(30.0, 1.0) == doctest::Approx(1000.0));
  CHECK(total_power_for(10.0, 0.5) == doctest::Approx(5.0));
  CHECK(criterion_snr_scale(20.0, 4) == doctest::Approx(25.0));
}

TEST_CASE("arrangement capacity reports the per-group average or the total") {
  auto rng = test_rng(2);
  const auto r = random_realization(rng, 2, {1, 1, 1});
  GroupingArrangement a;
  a.groups = {{0, 1}, {2}};
  const double g0 = group_sum_capacity(r, a.groups[0], PowerPolicy::kWaterfilling, 10.0, 1.0);
  const double g1 = group_sum_capacity(r, a.groups[1], PowerPolicy::kWaterfilling, 10.0, 1.0);
  CHECK(arrangement_capacity(r, a, PowerPolicy::kWaterfilling, 10.0, 1.0, CapacityReport::kTotal) ==
        doctest::Approx(g0 + g1));
  CHECK(arrangement_capacity(r, a, PowerPolicy::kWaterfilling, 10.0, 1.0, CapacityReport::kPerGroupAverage) ==
        doctest::Approx((g0 + g1) / 2.0));
}

TEST_CASE("a single trial echoes its capacity") {
  ExperimentSpec spec = small_spec();
  spec.scenario.trials = 1;
  spec.schedulers = {Scheduler::kGreedySelection};
  spec.criteria = {Criterion::kSelectionSimplified};
  const auto summary = run_experiment(spec, 1);
  REQUIRE(summary.records.size() == 3);
  const auto r = generate_realization(spec.scenario, 0);
  const auto a = greedy_select(r, Criterion::kSelectionSimplified, ScoreContext{});
  for (const auto& rec : summary.records) {
    const double expected = arrangement_capacity(r, a, spec.power_policy, total_power_for(rec.snr_db, 1.0), 1.0,
                                                 spec.capacity_report);
    CHECK(rec.outage_capacity == expected);
    CHECK(rec.mean_capacity == expected);
    CHECK(rec.trials == 1);
    CHECK(rec.comparisons_mean == static_cast<double>(a.comparisons));
  }
}

TEST_CASE("results are bit-identical across runs and thread counts") {
  const ExperimentSpec spec = small_spec();
  const std::string one = csv_of(run_experiment(spec, 1));
  CHECK(one == csv_of(run_experiment(spec, 1)));
  CHECK(one == csv_of(run_experiment(spec, 3)));
  const auto a = run_experiment(spec, 2);
  const auto b = run_experiment(spec, 4);
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].samples == b.records[i].samples);
}

TEST_CASE("summary statistics do not depend on trial order") {
  const auto summary = run_experiment(small_spec(), 2);
  for (const auto& rec : summary.records) {
    std::vector<double> permuted = rec.samples;
    std::mt19937_64 gen(5);
    std::shuffle(permuted.begin(), permuted.end(), gen);
    CHECK(outage_quantile(permuted, 0.10) == rec.outage_capacity);
    std::sort(permuted.begin(), permuted.end());
    double sum = 0.0;
    for (double v : permuted) sum += v;
    CHECK(sum / static_cast<double>(permuted.size()) == rec.mean_capacity);
  }
}

TEST_CASE("exhaustive selection dominates greedy selection per trial") {
  ExperimentSpec spec = small_spec();
  spec.scenario.trials = 60;
  const auto summary = run_experiment(spec, 2);
  for (double snr : spec.scenario.snr_db) {
    for (Criterion c : spec.criteria) {
      const auto& ex = summary.find(Scheduler::kExhaustiveSelection, c, snr);
      const auto& gr = summary.find(Scheduler::kGreedySelection, c, snr);
      for (std::size_t t = 0; t < ex.samples.size(); ++t) CHECK(ex.samples[t] >= gr.samples[t] - 1e-9);
      CHECK(ex.outage_capacity >= gr.outage_capacity - 1e-9);
    }
  }
}

TEST_CASE("outage capacity grows with SNR") {
  ExperimentSpec spec = small_spec();
  spec.scenario.snr_db = {0.0, 10.0, 20.0, 30.0, 40.0};
  spec.scenario.trials = 300;
  spec.schedulers = {Scheduler::kGreedySelection, Scheduler::kAlgorithm1};
  const auto summary = run_experiment(spec, 2);
  for (Scheduler s : spec.schedulers) {
    for (Criterion c : spec.criteria) {
      for (std::size_t i = 1; i < spec.scenario.snr_db.size(); ++i) {
        const auto& lo = summary.find(s, c, spec.scenario.snr_db[i - 1]);
        const auto& hi = summary.find(s, c, spec.scenario.snr_db[i]);
        const double band = 2.0 * bootstrap_outage_difference_se(hi.samples, lo.samples, 0.1, 200, 7);
        CHECK(hi.outage_capacity >= lo.outage_capacity - band);
      }
    }
  }
}

TEST_CASE("infeasible scenarios carry the trial number") {
  ExperimentSpec spec = small_spec();
  spec.scenario.transmit_antennas = 2;
  UserProfile wide;
  wide.antennas = 2;
  spec.scenario.users.assign(4, wide);
  spec.schedulers = {Scheduler::kConventionalGrouping};
  spec.criteria = {Criterion::kGroupingOriented};
  spec.group_size = 2;
  CHECK_THROWS_WITH_AS(run_experiment(spec, 1), doctest::Contains("trial 0"), InfeasibleError);
}

TEST_CASE("spec validation") {
  CHECK_NOTHROW(validate_spec(small_spec()));
  auto bad = [](auto mutate) {
    ExperimentSpec s = small_spec();
    mutate(s);
    CHECK_THROWS_AS(validate_spec(s), ConfigError);
  };
  bad([](ExperimentSpec& s) { s.schedulers.clear(); });
  bad([](ExperimentSpec& s) { s.criteria.clear(); });
  bad([](ExperimentSpec& s) { s.outage_level = 0.0; });
  bad([](ExperimentSpec& s) { s.outage_level = 1.0; });
  bad([](ExperimentSpec& s) { s.group_size = 7; });
  bad([](ExperimentSpec& s) { s.scenario.users.assign(13, UserProfile{}); });
  bad([](ExperimentSpec& s) { s.scenario.trials = 0; });
}

TEST_CASE("thread count override") {
  ::setenv("HETSCHED_THREADS", "3", 1);
  CHECK(resolve_thread_count() == 3);
  ::setenv("HETSCHED_THREADS", "zero", 1);
  CHECK_THROWS_AS(resolve_thread_count(), ConfigError);
  ::setenv("HETSCHED_THREADS", "0", 1);
  CHECK_THROWS_AS(resolve_thread_count(), ConfigError);
  ::unsetenv("HETSCHED_THREADS");
  CHECK(resolve_thread_count() >= 1);
}

TEST_CASE("presets match their figure setups") {
  const auto names = preset_names();
  CHECK(names.size() == 8);
  for (auto n : names) CHECK_NOTHROW(figure_preset(n));

  const auto f3 = figure_preset("fig3");
  CHECK(f3.scenario.transmit_antennas == 6);
  std::vector<int> ants;
  for (const auto& u : f3.scenario.users) ants.push_back(*u.antennas);
  CHECK(ants == std::vector<int>{1, 1, 1, 2, 3, 4});
  CHECK(f3.criteria.size() == 6);
  CHECK(std::find(f3.schedulers.begin(), f3.schedulers.end(), Scheduler::kExhaustiveGrouping) != f3.schedulers.end());
  CHECK(f3.scenario.trials == 2000);

  const auto f5 = figure_preset("fig5");
  CHECK(f5.scenario.transmit_antennas == 12);
  CHECK(f5.scenario.users.size() == 20);
  CHECK(f5.scenario.max_receive_antennas == 2);
  CHECK(f5.schedulers == std::vector<Scheduler>{Scheduler::kGreedySelection});

  const auto f7 = figure_preset("fig7");
  CHECK(f7.schedulers == std::vector<Scheduler>{Scheduler::kAlgorithm1, Scheduler::kAlgorithm2,
                                                Scheduler::kConventionalGrouping});
  CHECK(f7.criteria == std::vector<Criterion>{Criterion::kSelectionSimplified});
  CHECK(figure_preset("fig8").criteria == std::vector<Criterion>{Criterion::kLargestPrincipalAngle});

  PresetOptions opt;
  opt.trials = 7;
  opt.seed = 5;
  opt.users = 10;
  const auto f6 = figure_preset("fig6", opt);
  CHECK(f6.scenario.trials == 7);
  CHECK(f6.scenario.seed == 5);
  CHECK(f6.scenario.users.size() == 10);
  CHECK_THROWS_AS(figure_preset("fig3", opt), ConfigError);
  CHECK_THROWS_WITH_AS(figure_preset("fig9"), doctest::Contains("fig5"), ConfigError);
}

TEST_CASE("CSV output has one row per combination") {
  const ExperimentSpec spec = small_spec();
  const std::string csv = csv_of(run_experiment(spec, 2));
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 1 + 3 * 2 * 3);
  CHECK(csv.rfind("scheduler,criterion,snr_db,outage_capacity,mean_capacity,trials,comparisons_mean\n", 0) == 0);
  CHECK(csv_of(OutageSummary{}) ==
        "scheduler,criterion,snr_db,outage_capacity,mean_capacity,trials,comparisons_mean\n");
}

TEST_CASE("JSON output carries the spec and the records") {
  ExperimentSpec spec = small_spec();
  spec.scenario.trials = 5;
  const auto summary = run_experiment(spec, 1);
  std::ostringstream out;
  write_json(spec, summary, out);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc.at("records").size() == summary.records.size());
  CHECK(doc.at("records")[0].at("scheduler") == "greedy-selection");
  CHECK(spec_from_json(doc.dump()) == spec);
}

TEST_CASE("spec JSON round-trips") {
  ExperimentSpec spec = parse_config(kConfig);
  CHECK(spec_from_json(spec_to_json(spec)) == spec);
  const auto f6 = figure_preset("fig6");
  CHECK(spec_from_json(spec_to_json(f6)) == f6);
  CHECK_THROWS_AS(spec_from_json("{not json"), ConfigError);
}

TEST_CASE("serialization writes files and names the path on failure") {
  ExperimentSpec spec = small_spec();
  spec.scenario.trials = 3;
  const auto summary = run_experiment(spec, 1);
  const auto path = std::filesystem::temp_directory_path() / "hetsched_test_output.csv";
  spec.output = path.string();
  std::ostringstream unused;
  serialize_results(spec, summary, unused);
  CHECK(unused.str().empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == csv_of(summary));
  std::filesystem::remove(path);

  spec.output = "/nonexistent-dir/out.csv";
  CHECK_THROWS_WITH(serialize_results(spec, summary, unused), doctest::Contains("/nonexistent-dir/out.csv"));
}

TEST_CASE("config parsing") {
  const ExperimentSpec spec = parse_config(kConfig);
  CHECK(spec.name == "demo");
  CHECK(spec.scenario.transmit_antennas == 4);
  CHECK(spec.scenario.snr_db == std::vector<double>{10.0, 30.0});
  CHECK(spec.scenario.trials == 25);
  CHECK(spec.scenario.seed == 99);
  CHECK(spec.scenario.path_loss_exponent == 3.5);
  CHECK_FALSE(spec.scenario.redraw_per_trial);
  REQUIRE(spec.scenario.users.size() == 5);
  CHECK(spec.scenario.users[0].antennas == 2);
  CHECK(spec.scenario.users[0].distance == 300.0);
  CHECK(spec.scenario.users[0].rx_correlation == 0.2);
  CHECK_FALSE(spec.scenario.users[0].tx_correlation.has_value());
  CHECK_FALSE(spec.scenario.users[1].antennas.has_value());
  CHECK(spec.scenario.users[1].tx_correlation == 0.0);
  CHECK(spec.scenario.users[4] == UserProfile{});
  CHECK(spec.schedulers == std::vector<Scheduler>{Scheduler::kGreedySelection, Scheduler::kAlgorithm1});
  CHECK(spec.criteria == std::vector<Criterion>{Criterion::kSelectionSimplified, Criterion::kGroupingOriented});
  CHECK(spec.power_policy == PowerPolicy::kEqual);
  CHECK(spec.outage_level == 0.05);
  CHECK(spec.group_size == 0);
  CHECK(spec.capacity_report == CapacityReport::kTotal);
  CHECK(spec.format == OutputFormat::kJson);
}

TEST_CASE("config errors name the line") {
  auto fails_with = [](const std::string& text, const std::string& fragment) {
    CAPTURE(text);
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains(fragment.c_str()), ConfigError);
  };
  const std::string users = "[users]\nrandom = 6\n";
  const std::string exp = "[experiment]\nschedulers = greedy-selection\ncriteria = random\n";
  fails_with("[scenario]\ncolour = blue\n" + users + exp, "line 2: unknown key 'colour'");
  fails_with("[extras]\n" + users + exp, "line 1: unknown section");
  fails_with("[scenario]\ntransmit_antennas = four\n" + users + exp, "expects a number");
  fails_with("[scenario]\ntrials = 10\n" + exp, "no [users]");
  fails_with(users + "user = 1 2 3\n" + exp, "line 3");
  fails_with(users + "[experiment]\nschedulers = magic\ncriteria = random\n", "unknown scheduler 'magic'");
  fails_with(users + "[experiment]\nschedulers = greedy-selection\ncriteria = psychic\n", "valid:");
  fails_with(users + exp + "outage_level = 1.5\n", "outage_level");
  fails_with("transmit_antennas = 4\n" + users + exp, "outside of a section");
  fails_with(users + "user = 0 300 0 0\n" + exp, "antennas must be >= 1");
}

TEST_CASE("config files report their path") {
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/experiment.ini"), doctest::Contains("/nonexistent/experiment.ini"),
                       ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "hetsched_bad.ini";
  std::ofstream(path) << "[nowhere]\n";
  CHECK_THROWS_WITH_AS(load_config(path.string()), doctest::Contains(path.string().c_str()), ConfigError);
  std::filesystem::remove(path);
}
