#include "helpers.hpp"

#include "hetsched/errors.hpp"
#include "hetsched/oracle.hpp"
#include "hetsched/schedulers.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace hetsched;
using namespace hetsched::testing;

namespace {

using Groups = std::vector<std::vector<std::size_t>>;

Groups normalized(Groups g) {
  for (auto& x : g) std::sort(x.begin(), x.end());
  std::sort(g.begin(), g.end());
  return g;
}

// Five single-antenna users in the plane, decreasing norms.
ChannelRealization planar_five() {
  const std::vector<ComplexMatrix> hs{planar(5, 0), planar(4, 10), planar(3, 80), planar(2, 5), planar(1, 90)};
  return ChannelRealization::from_channels(hs);
}

ChannelRealization random_pool(std::mt19937_64& rng, Index n_tx, std::size_t users, int max_rx) {
  std::uniform_int_distribution<int> ant(1, max_rx);
  std::vector<Index> antennas;
  for (std::size_t i = 0; i < users; ++i) antennas.push_back(ant(rng));
  return random_realization(rng, n_tx, antennas);
}

bool every_user_once(const GroupingArrangement& a, std::size_t users) {
  std::vector<int> seen(users, 0);
  for (const auto& g : a.groups) {
    for (std::size_t u : g) {
      if (u >= users) return false;
      ++seen[u];
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

const ScoreContext kCtx{};

}  // namespace

TEST_CASE("scheduler names round-trip") {
  for (Scheduler s : all_schedulers()) CHECK(parse_scheduler(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scheduler("round-robin"), ConfigError);
  CHECK(uses_criterion(Scheduler::kAlgorithm1));
  CHECK_FALSE(uses_criterion(Scheduler::kExhaustiveSelection));
  CHECK(depends_on_snr(Scheduler::kGreedySelection, Criterion::kSelectionFull));
  CHECK_FALSE(depends_on_snr(Scheduler::kGreedySelection, Criterion::kSelectionSimplified));
  CHECK(depends_on_snr(Scheduler::kExhaustiveGrouping, Criterion::kRandom));
}

TEST_CASE("Frobenius order is descending with lowest id first on ties") {
  const std::vector<ComplexMatrix> hs{unit_row(2, 0), unit_row(2, 1, 3.0), unit_row(2, 0, 1.0), unit_row(2, 1, 2.0)};
  const auto r = ChannelRealization::from_channels(hs);
  CHECK(frobenius_order(r) == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("greedy selection examples") {
  auto rng = test_rng(1);
  const auto one = random_realization(rng, 4, {2});
  const auto a = greedy_select(one, Criterion::kSelectionSimplified, kCtx);
  CHECK(a.groups == Groups{{0}});

  const auto full = random_realization(rng, 2, {2, 2, 2, 2});
  const auto b = greedy_select(full, Criterion::kSelectionSimplified, kCtx);
  REQUIRE(b.groups.size() == 1);
  CHECK(b.groups[0].size() == 1);
  CHECK(b.groups[0][0] == frobenius_order(full).front());
}

TEST_CASE("greedy selection matches the step-by-step recursion") {
  auto rng = test_rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto r = random_realization(rng, 4, {1, 1, 1, 1, 1, 1});
    const auto got = greedy_select(r, Criterion::kSelectionSimplified, kCtx);
    const auto expected = oracle::stepwise_greedy(
        r, [&](std::size_t k, std::span<const std::size_t> s) { return metric_selection_simplified(r, k, s); });
    CHECK(got.groups[0] == expected);
    CHECK(got.groups[0].size() == 4);
  }
  for (int i = 0; i < 50; ++i) {
    const auto r = random_pool(rng, 6, 8, 3);
    for (Criterion c : {Criterion::kSelectionFull, Criterion::kGeometricalAngle, Criterion::kGroupingOriented}) {
      const ScoreContext ctx{100.0, nullptr};
      const auto got = greedy_select(r, c, ctx);
      const auto expected = oracle::stepwise_greedy(
          r, [&](std::size_t k, std::span<const std::size_t> s) { return candidate_score(c, r, k, s, ctx); });
      CHECK(got.groups[0] == expected);
    }
  }
}

TEST_CASE("group-minimization hand trace with five single-antenna users") {
  const auto r = planar_five();
  const auto a = schedule_algorithm1(r, Criterion::kSelectionSimplified, kCtx);
  CHECK(a.groups == Groups{{0, 2}, {1, 3}, {4}});
  CHECK(a.comparisons == 3);
}

TEST_CASE("algorithm 1 starts from the floor of total receive antennas over M_T groups") {
  auto rng = test_rng(3);
  // 12 receive antennas over 6 transmit antennas: two seeded groups.
  const auto r = random_realization(rng, 6, {1, 1, 1, 2, 3, 4});
  const auto a = schedule_algorithm1(r, Criterion::kSelectionSimplified, kCtx);
  const auto order = frobenius_order(r);
  REQUIRE(a.groups.size() >= 2);
  CHECK(a.groups[0][0] == order[0]);
  CHECK(a.groups[1][0] == order[1]);
  CHECK(every_user_once(a, r.size()));
  CHECK(oracle::arrangement_is_feasible(r, a.groups));
}

TEST_CASE("users that fill the transmit space each get their own group") {
  auto rng = test_rng(4);
  const auto r = random_realization(rng, 3, {3, 3, 3, 3});
  const auto order = frobenius_order(r);
  const auto a1 = schedule_algorithm1(r, Criterion::kSelectionSimplified, kCtx);
  const auto a2 = schedule_algorithm2(r, Criterion::kSelectionSimplified, kCtx);
  CHECK(a1.groups.size() == 4);
  REQUIRE(a2.groups.size() == 4);
  for (std::size_t g = 0; g < 4; ++g) CHECK(a2.groups[g] == std::vector<std::size_t>{order[g]});
}

TEST_CASE("algorithm 2 hand traces") {
  const auto a = schedule_algorithm2(planar_five(), Criterion::kSelectionSimplified, kCtx);
  CHECK(a.groups == Groups{{0, 2}, {1, 4}, {3}});
  CHECK(a.comparisons == 6);

  const double s = std::sqrt(2.0);
  ComplexMatrix u0 = ComplexMatrix::Zero(2, 4), u4 = ComplexMatrix::Zero(2, 4), u3 = ComplexMatrix::Zero(1, 4);
  u0(0, 0) = 3.0;
  u0(1, 1) = 3.0;
  u4(0, 3) = 2.0;
  u4(1, 0) = 2.0;
  u3(0, 2) = s;
  u3(0, 3) = s;
  const std::vector<ComplexMatrix> hs{u0, unit_row(4, 2, 4.0), unit_row(4, 0, 3.0), u3, u4, unit_row(4, 3)};
  const auto r = ChannelRealization::from_channels(hs);
  const auto b = schedule_algorithm2(r, Criterion::kSelectionSimplified, kCtx);
  CHECK(b.groups == Groups{{0, 1, 3}, {2, 5, 4}});
  CHECK(b.comparisons == 11);
}

TEST_CASE("algorithm 2 puts orthogonal single-antenna users in one group") {
  std::vector<ComplexMatrix> hs;
  for (Index i = 0; i < 4; ++i) hs.push_back(unit_row(4, i, 1.0 + 0.1 * static_cast<double>(i)));
  const auto r = ChannelRealization::from_channels(hs);
  const auto a = schedule_algorithm2(r, Criterion::kSelectionSimplified, kCtx);
  REQUIRE(a.groups.size() == 1);
  CHECK(a.groups[0].size() == 4);
}

TEST_CASE("partition enumeration counts") {
  CHECK(enumerate_partitions(4, 2).size() == 3);
  CHECK(enumerate_partitions(6, 2).size() == 15);
  CHECK(enumerate_partitions(6, 3).size() == 10);
  CHECK(enumerate_partitions(5, 2).size() == 15);
  CHECK(enumerate_partitions(7, 3).size() == 70);
  for (auto [n, g] : {std::pair<std::size_t, std::size_t>{6, 2}, {7, 3}, {8, 3}, {5, 2}}) {
    auto a = enumerate_partitions(n, g);
    auto b = oracle::restricted_growth_partitions(n, g);
    std::set<Groups> sa, sb;
    for (auto& p : a) sa.insert(normalized(p));
    for (auto& p : b) sb.insert(normalized(p));
    CHECK(sa.size() == a.size());
    CHECK(sa == sb);
  }
}

TEST_CASE("conventional grouping separates correlated users") {
  const std::vector<ComplexMatrix> hs{unit_row(2, 0), unit_row(2, 0) + 0.1 * unit_row(2, 1), unit_row(2, 1),
                                      unit_row(2, 1) + 0.1 * unit_row(2, 0)};
  const auto r = ChannelRealization::from_channels(hs);
  const auto a = schedule_conventional(r, Criterion::kLargestPrincipalAngle, 2, 12, kCtx);
  CHECK(normalized(a.groups) == Groups{{0, 3}, {1, 2}});
}

TEST_CASE("conventional grouping matches full re-enumeration") {
  auto rng = test_rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto r = random_realization(rng, 4, {1, 2, 1, 2, 1, 2});
    for (Criterion c : {Criterion::kGroupingOriented, Criterion::kGeometricalAngle, Criterion::kChordal}) {
      const auto got = schedule_conventional(r, c, 2, 12, kCtx);
      const auto expected = oracle::brute_force_conventional(
          r, 2, [&](std::size_t k, std::span<const std::size_t> s) { return candidate_score(c, r, k, s, kCtx); });
      CHECK(normalized(got.groups) == normalized(expected));
    }
  }
}

TEST_CASE("conventional grouping errors") {
  auto rng = test_rng(6);
  const auto big = random_realization(rng, 4, std::vector<Index>(13, 1));
  CHECK_THROWS_WITH_AS(schedule_conventional(big, Criterion::kGroupingOriented, 2, 12, kCtx),
                       doctest::Contains("combinatorial blow-up"), ConfigError);
  const auto wide = random_realization(rng, 2, {2, 2, 2});
  CHECK_THROWS_AS(schedule_conventional(wide, Criterion::kGroupingOriented, 2, 12, kCtx), InfeasibleError);
  CHECK_THROWS_AS(schedule_conventional(wide, Criterion::kGroupingOriented, 4, 12, kCtx), ConfigError);
}

TEST_CASE("automatic group size picks the largest feasible size") {
  auto rng = test_rng(7);
  CHECK(largest_feasible_group_size(random_realization(rng, 6, {1, 1, 1, 2, 3, 4})) == 4);
  CHECK(largest_feasible_group_size(random_realization(rng, 4, {1, 1, 1, 1})) == 4);
  CHECK(largest_feasible_group_size(random_realization(rng, 2, {2, 2})) == 1);
}

TEST_CASE("exhaustive selection") {
  auto rng = test_rng(8);
  const auto one = random_realization(rng, 4, {3});
  CHECK(exhaustive_select(one, PowerPolicy::kWaterfilling, 10.0, 1.0).groups == Groups{{0}});
  for (int i = 0; i < 20; ++i) {
    const auto r = random_pool(rng, 4, 6, 3);
    const auto got = exhaustive_select(r, PowerPolicy::kWaterfilling, 100.0, 1.0);
    const auto expected = oracle::brute_force_best_subset(r, PowerPolicy::kWaterfilling, 100.0, 1.0);
    CHECK(got.groups[0] == expected);
    const double best = group_sum_capacity(r, got.groups[0], PowerPolicy::kWaterfilling, 100.0, 1.0);
    for (Criterion c : all_criteria()) {
      std::mt19937_64 gen(static_cast<std::uint64_t>(i));
      const auto g = greedy_select(r, c, ScoreContext{100.0 / 4.0, &gen});
      CHECK(group_sum_capacity(r, g.groups[0], PowerPolicy::kWaterfilling, 100.0, 1.0) <= best + 1e-9);
    }
  }
  const auto big = random_realization(rng, 4, std::vector<Index>(13, 1));
  CHECK_THROWS_WITH(exhaustive_select(big, PowerPolicy::kEqual, 1.0, 1.0), doctest::Contains("combinatorial blow-up"));
}

TEST_CASE("exhaustive grouping maximizes the per-group average capacity") {
  auto rng = test_rng(9);
  for (int i = 0; i < 10; ++i) {
    const auto r = random_realization(rng, 4, {1, 2, 1, 2, 1, 2});
    const auto got = exhaustive_grouping(r, 2, PowerPolicy::kWaterfilling, 100.0, 1.0);
    auto average = [&](const Groups& p) {
      double t = 0.0;
      for (const auto& g : p) t += group_sum_capacity(r, g, PowerPolicy::kWaterfilling, 100.0, 1.0);
      return t / static_cast<double>(p.size());
    };
    const double best = average(got.groups);
    for (const auto& p : oracle::restricted_growth_partitions(r.size(), 2)) {
      if (oracle::arrangement_is_feasible(r, p)) CHECK(average(p) <= best + 1e-9);
    }
    CHECK(every_user_once(got, r.size()));
  }
}

TEST_CASE("random scheduling") {
  auto rng = test_rng(10);
  const auto one = random_realization(rng, 4, {2});
  std::mt19937_64 g1(5), g2(5);
  CHECK(random_schedule(one, g1).groups == Groups{{0}});
  const auto r = random_pool(rng, 4, 10, 3);
  std::mt19937_64 a(17), b(17);
  const auto x = random_schedule(r, a);
  CHECK(x == random_schedule(r, b));
  CHECK(oracle::arrangement_is_feasible(r, x.groups));
}

TEST_CASE("random scheduling averages below greedy selection") {
  Scenario s;
  s.transmit_antennas = 4;
  s.users.assign(8, UserProfile{});
  s.max_receive_antennas = 2;
  const double pt = 1000.0;
  double random_sum = 0.0, greedy_sum = 0.0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto r = generate_realization(s, static_cast<std::uint64_t>(t));
    auto gen = make_stream(s.seed, static_cast<std::uint64_t>(t), 0, StreamPurpose::kScheduler);
    const auto x = random_schedule(r, gen);
    const auto y = greedy_select(r, Criterion::kSelectionSimplified, kCtx);
    random_sum += group_sum_capacity(r, x.groups[0], PowerPolicy::kWaterfilling, pt, 1.0);
    greedy_sum += group_sum_capacity(r, y.groups[0], PowerPolicy::kWaterfilling, pt, 1.0);
  }
  CHECK(random_sum / trials < greedy_sum / trials);
}

TEST_CASE("every scheduler emits feasible arrangements, and the grouping ones serve everyone once") {
  auto rng = test_rng(11);
  for (int i = 0; i < 40; ++i) {
    const auto r = random_pool(rng, 4 + i % 3, 8, 4);
    std::mt19937_64 gen(static_cast<std::uint64_t>(i));
    SchedulerOptions opt;
    opt.rng = &gen;
    opt.total_power = 100.0;
    opt.group_size = 2;
    for (Criterion c : all_criteria()) {
      opt.criterion = c;
      for (Scheduler s : all_schedulers()) {
        if (!uses_criterion(s) && c != Criterion::kRandom) continue;
        CAPTURE(to_string(s));
        CAPTURE(to_string(c));
        GroupingArrangement a;
        try {
          a = run_scheduler(s, r, opt);
        } catch (const InfeasibleError&) {
          // Fixed-size grouping can be impossible for some antenna mixes.
          CHECK((s == Scheduler::kConventionalGrouping || s == Scheduler::kExhaustiveGrouping));
          continue;
        }
        CHECK(oracle::arrangement_is_feasible(r, a.groups));
        if (s == Scheduler::kAlgorithm1 || s == Scheduler::kAlgorithm2 ||
            s == Scheduler::kConventionalGrouping || s == Scheduler::kExhaustiveGrouping) {
          CHECK(every_user_once(a, r.size()));
        }
      }
    }
  }
}

TEST_CASE("schedulers are deterministic for a fixed seed") {
  auto rng = test_rng(12);
  const auto r = random_pool(rng, 6, 10, 4);
  for (Scheduler s : {Scheduler::kGreedySelection, Scheduler::kAlgorithm1, Scheduler::kAlgorithm2, Scheduler::kRandom}) {
    std::mt19937_64 a(3), b(3);
    SchedulerOptions oa, ob;
    oa.criterion = ob.criterion = Criterion::kRandom;
    oa.rng = &a;
    ob.rng = &b;
    CHECK(run_scheduler(s, r, oa) == run_scheduler(s, r, ob));
  }
}

TEST_CASE("comparison counters stay within the stated complexity") {
  auto rng = test_rng(13);
  std::uniform_int_distribution<std::size_t> users(4, 40);
  for (int i = 0; i < 60; ++i) {
    const std::size_t k = users(rng);
    const auto r = random_pool(rng, 8, k, 4);
    Index total_rx = 0;
    for (const auto& u : r.users) total_rx += u.antennas();
    const double n_g = static_cast<double>(std::clamp<Index>(total_rx / 8, 1, static_cast<Index>(k)));
    const double kk = static_cast<double>(k);
    const auto a1 = schedule_algorithm1(r, Criterion::kSelectionSimplified, kCtx);
    const auto a2 = schedule_algorithm2(r, Criterion::kSelectionSimplified, kCtx);
    CAPTURE(k);
    CHECK(static_cast<double>(a1.comparisons) <= 2.0 * n_g * (kk - n_g) + 1e-9);
    CHECK(static_cast<double>(a2.comparisons) <= 2.0 * (kk / 2.0) * (kk - 1.0) + 1e-9);
  }
}

TEST_CASE("greedy selection starts from the largest Frobenius norm") {
  auto rng = test_rng(14);
  for (int i = 0; i < 20; ++i) {
    const auto r = random_pool(rng, 4, 6, 2);
    const auto g = greedy_select(r, Criterion::kSelectionSimplified, kCtx);
    CHECK(g.groups[0].front() == frobenius_order(r).front());
  }
}
