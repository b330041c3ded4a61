#pragma once

// User selection and user grouping algorithms. Every scheduler returns a
// GroupingArrangement whose groups each satisfy the BD dimensionality
// constraint (sum of numerical channel ranks <= M_T).

#include "hetsched/criteria.hpp"
#include "hetsched/precoding.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hetsched {

enum class Scheduler {
  kGreedySelection,
  kAlgorithm1,
  kAlgorithm2,
  kConventionalGrouping,
  kExhaustiveSelection,
  kExhaustiveGrouping,
  kRandom,
};

std::string_view to_string(Scheduler s);
Scheduler parse_scheduler(std::string_view text);
std::span<const Scheduler> all_schedulers();

/// True when the scheduler consults a Criterion (exhaustive and random ones do not).
bool uses_criterion(Scheduler s);
/// True when the produced arrangement may change with the SNR point.
bool depends_on_snr(Scheduler s, Criterion c);

struct GroupingArrangement {
  std::vector<std::vector<std::size_t>> groups;
  // Number of criterion (or capacity) evaluations performed.
  std::size_t comparisons = 0;

  std::size_t scheduled_users() const;
  bool operator==(const GroupingArrangement&) const = default;
};

inline constexpr std::size_t kDefaultExhaustiveLimit = 12;

struct SchedulerOptions {
  Criterion criterion = Criterion::kSelectionSimplified;
  double snr_scale = 1.0;          // forwarded to the selection-full criterion
  std::mt19937_64* rng = nullptr;  // random scheduler and random criterion
  std::size_t group_size = 0;      // conventional/exhaustive grouping; 0 picks the largest feasible size
  std::size_t exhaustive_limit = kDefaultExhaustiveLimit;
  PowerPolicy power_policy = PowerPolicy::kWaterfilling;
  double total_power = 1.0;
  double noise_variance = 1.0;
};

/// Users sorted by decreasing Frobenius norm, lowest id first on ties.
std::vector<std::size_t> frobenius_order(const ChannelRealization& r);

/// Sum of the numerical ranks of the members fits in M_T.
bool is_feasible_group(const ChannelRealization& r, std::span<const std::size_t> members);

GroupingArrangement greedy_select(const ChannelRealization& r, Criterion criterion,
                                  const ScoreContext& ctx);
GroupingArrangement schedule_algorithm1(const ChannelRealization& r, Criterion criterion,
                                        const ScoreContext& ctx);
GroupingArrangement schedule_algorithm2(const ChannelRealization& r, Criterion criterion,
                                        const ScoreContext& ctx);

/// Partitions of {0..K-1} into groups of `group_size` users plus one residual
/// group of K mod group_size users, each partition listed once.
std::vector<std::vector<std::vector<std::size_t>>> enumerate_partitions(std::size_t users,
                                                                        std::size_t group_size);

/// Largest group size admitting a feasible partition.
std::size_t largest_feasible_group_size(const ChannelRealization& r);

/// Max-min grouping over feasible partitions. Each user is scored against the
/// rest of its group and an arrangement is worth its weakest user.
GroupingArrangement schedule_conventional(const ChannelRealization& r, Criterion criterion,
                                          std::size_t group_size, std::size_t exhaustive_limit,
                                          const ScoreContext& ctx);

/// Feasible subset with the largest group capacity.
GroupingArrangement exhaustive_select(const ChannelRealization& r, PowerPolicy policy,
                                      double total_power, double noise_variance,
                                      std::size_t exhaustive_limit = kDefaultExhaustiveLimit);

/// Feasible partition with the largest per-group average capacity.
GroupingArrangement exhaustive_grouping(const ChannelRealization& r, std::size_t group_size,
                                        PowerPolicy policy, double total_power,
                                        double noise_variance,
                                        std::size_t exhaustive_limit = kDefaultExhaustiveLimit);

/// Random first user, then uniformly random feasible additions until none fits.
GroupingArrangement random_schedule(const ChannelRealization& r, std::mt19937_64& rng);

GroupingArrangement run_scheduler(Scheduler s, const ChannelRealization& r,
                                  const SchedulerOptions& options);

}  // namespace hetsched
