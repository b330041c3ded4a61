#include "hetsched/schedulers.hpp"

#include "hetsched/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace hetsched {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SchedulerName {
  Scheduler kind;
  std::string_view name;
};

constexpr std::array<SchedulerName, 7> kSchedulerNames{{
    {Scheduler::kGreedySelection, "greedy-selection"},
    {Scheduler::kAlgorithm1, "algorithm1-group-min"},
    {Scheduler::kAlgorithm2, "algorithm2-dof-max"},
    {Scheduler::kConventionalGrouping, "conventional-grouping"},
    {Scheduler::kExhaustiveSelection, "exhaustive-selection"},
    {Scheduler::kExhaustiveGrouping, "exhaustive-grouping"},
    {Scheduler::kRandom, "random"},
}};

constexpr std::array<Scheduler, 7> kAllSchedulers{
    Scheduler::kGreedySelection,      Scheduler::kAlgorithm1,
    Scheduler::kAlgorithm2,           Scheduler::kConventionalGrouping,
    Scheduler::kExhaustiveSelection,  Scheduler::kExhaustiveGrouping,
    Scheduler::kRandom,
};

std::vector<Index> user_ranks(const ChannelRealization& r) {
  std::vector<Index> ranks;
  ranks.reserve(r.size());
  for (const auto& u : r.users) ranks.push_back(numerical_rank(u.channel));
  return ranks;
}

Index rank_sum(const std::vector<Index>& ranks, std::span<const std::size_t> members) {
  Index total = 0;
  for (std::size_t m : members) total += ranks[m];
  return total;
}

void check_pool(const ChannelRealization& r, const char* who) {
  if (r.size() == 0) throw std::invalid_argument(std::string(who) + ": empty user pool");
}

void check_limit(std::size_t users, std::size_t limit, const char* who) {
  if (users > limit || users > 30) {
    throw ConfigError(std::string(who) + ": combinatorial blow-up (" + std::to_string(users) +
                      " users exceeds the exhaustive limit of " + std::to_string(limit) + ")");
  }
}

std::uint32_t mask_of(std::span<const std::size_t> members) {
  std::uint32_t m = 0;
  for (std::size_t u : members) m |= std::uint32_t{1} << u;
  return m;
}

void enumerate_rec(std::uint32_t remaining, std::size_t full_left, std::size_t residual,
                   std::size_t group_size, std::vector<std::vector<std::size_t>>& current,
                   std::vector<std::vector<std::vector<std::size_t>>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  const auto first = static_cast<std::size_t>(std::countr_zero(remaining));
  std::vector<std::size_t> pool;
  for (std::size_t u = first + 1; u < 32; ++u) {
    if (remaining & (std::uint32_t{1} << u)) pool.push_back(u);
  }
  auto try_size = [&](std::size_t size, std::size_t next_full, std::size_t next_residual) {
    if (size == 0 || size - 1 > pool.size()) return;
    // Walk the (size-1)-combinations of the pool in lexicographic order.
    std::vector<std::size_t> idx(size - 1);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
      std::vector<std::size_t> group{first};
      std::uint32_t used = std::uint32_t{1} << first;
      for (std::size_t i : idx) {
        group.push_back(pool[i]);
        used |= std::uint32_t{1} << pool[i];
      }
      current.push_back(std::move(group));
      enumerate_rec(remaining & ~used, next_full, next_residual, group_size, current, out);
      current.pop_back();
      std::size_t i = idx.size();
      while (i > 0 && idx[i - 1] == pool.size() - idx.size() + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < idx.size(); ++j) idx[j] = idx[j - 1] + 1;
    }
  };
  if (full_left > 0) try_size(group_size, full_left - 1, residual);
  if (residual > 0) try_size(residual, full_left, 0);
}

std::vector<std::vector<std::vector<std::size_t>>> feasible_partitions(
    const ChannelRealization& r, const std::vector<Index>& ranks, std::size_t group_size) {
  auto all = enumerate_partitions(r.size(), group_size);
  std::vector<std::vector<std::vector<std::size_t>>> keep;
  for (auto& p : all) {
    const bool ok = std::all_of(p.begin(), p.end(), [&](const auto& g) {
      return rank_sum(ranks, g) <= r.transmit_antennas;
    });
    if (ok) keep.push_back(std::move(p));
  }
  return keep;
}

std::size_t resolve_group_size(const ChannelRealization& r, std::size_t group_size) {
  if (group_size == 0) return largest_feasible_group_size(r);
  if (group_size > r.size()) {
    throw ConfigError("group size " + std::to_string(group_size) + " exceeds the number of users");
  }
  return group_size;
}

}  // namespace

std::string_view to_string(Scheduler s) {
  for (const auto& entry : kSchedulerNames) {
    if (entry.kind == s) return entry.name;
  }
  return "unknown";
}

Scheduler parse_scheduler(std::string_view text) {
  for (const auto& entry : kSchedulerNames) {
    if (entry.name == text) return entry.kind;
  }
  std::string valid;
  for (const auto& entry : kSchedulerNames) {
    if (!valid.empty()) valid += ", ";
    valid += entry.name;
  }
  throw ConfigError("unknown scheduler '" + std::string(text) + "' (valid: " + valid + ")");
}

std::span<const Scheduler> all_schedulers() { return kAllSchedulers; }

bool uses_criterion(Scheduler s) {
  switch (s) {
    case Scheduler::kGreedySelection:
    case Scheduler::kAlgorithm1:
    case Scheduler::kAlgorithm2:
    case Scheduler::kConventionalGrouping:
      return true;
    default:
      return false;
  }
}

bool depends_on_snr(Scheduler s, Criterion c) {
  if (s == Scheduler::kExhaustiveSelection || s == Scheduler::kExhaustiveGrouping) return true;
  return uses_criterion(s) && c == Criterion::kSelectionFull;
}

std::size_t GroupingArrangement::scheduled_users() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

std::vector<std::size_t> frobenius_order(const ChannelRealization& r) {
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> norms;
  for (const auto& u : r.users) norms.push_back(u.channel.squaredNorm());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  return order;
}

bool is_feasible_group(const ChannelRealization& r, std::span<const std::size_t> members) {
  return group_dimension(r, members) <= r.transmit_antennas;
}

GroupingArrangement greedy_select(const ChannelRealization& r, Criterion criterion,
                                  const ScoreContext& ctx) {
  check_pool(r, "greedy_select");
  const auto ranks = user_ranks(r);
  GroupingArrangement out;
  std::vector<std::size_t> selected{frobenius_order(r).front()};
  std::vector<bool> taken(r.size(), false);
  taken[selected.front()] = true;
  while (true) {
    const Index used = rank_sum(ranks, selected);
    std::size_t best = r.size();
    double best_score = kNegInf;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (taken[k] || used + ranks[k] > r.transmit_antennas) continue;
      const double score = candidate_score(criterion, r, k, selected, ctx);
      ++out.comparisons;
      if (best == r.size() || score > best_score) {
        best = k;
        best_score = score;
      }
    }
    if (best == r.size()) break;
    selected.push_back(best);
    taken[best] = true;
  }
  out.groups.push_back(std::move(selected));
  return out;
}

GroupingArrangement schedule_algorithm1(const ChannelRealization& r, Criterion criterion,
                                        const ScoreContext& ctx) {
  check_pool(r, "schedule_algorithm1");
  const auto ranks = user_ranks(r);
  Index total_rx = 0;
  for (const auto& u : r.users) total_rx += u.antennas();
  const auto n_groups = static_cast<std::size_t>(
      std::clamp<Index>(total_rx / r.transmit_antennas, 1, static_cast<Index>(r.size())));

  const auto order = frobenius_order(r);
  GroupingArrangement out;
  for (std::size_t g = 0; g < n_groups; ++g) out.groups.push_back({order[g]});

  for (std::size_t pos = n_groups; pos < order.size(); ++pos) {
    const std::size_t k = order[pos];
    std::size_t best = out.groups.size();
    double best_score = kNegInf;
    for (std::size_t g = 0; g < out.groups.size(); ++g) {
      if (rank_sum(ranks, out.groups[g]) + ranks[k] > r.transmit_antennas) continue;
      const double score = candidate_score(criterion, r, k, out.groups[g], ctx);
      ++out.comparisons;
      if (best == out.groups.size() || score > best_score) {
        best = g;
        best_score = score;
      }
    }
    if (best == out.groups.size()) {
      out.groups.push_back({k});
    } else {
      out.groups[best].push_back(k);
    }
  }
  return out;
}

GroupingArrangement schedule_algorithm2(const ChannelRealization& r, Criterion criterion,
                                        const ScoreContext& ctx) {
  check_pool(r, "schedule_algorithm2");
  const auto ranks = user_ranks(r);
  const auto order = frobenius_order(r);
  std::vector<bool> taken(r.size(), false);
  std::size_t left = r.size();
  GroupingArrangement out;

  while (left > 0) {
    std::vector<std::size_t> group;
    for (std::size_t u : order) {
      if (!taken[u]) {
        group.push_back(u);
        taken[u] = true;
        --left;
        break;
      }
    }
    while (left > 0) {
      const Index used = rank_sum(ranks, group);
      std::size_t best = r.size();
      double best_score = kNegInf;
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (taken[k] || used + ranks[k] > r.transmit_antennas) continue;
        const double score = candidate_score(criterion, r, k, group, ctx);
        ++out.comparisons;
        if (best == r.size() || score > best_score) {
          best = k;
          best_score = score;
        }
      }
      if (best == r.size()) break;
      group.push_back(best);
      taken[best] = true;
      --left;
    }
    out.groups.push_back(std::move(group));
  }
  return out;
}

std::vector<std::vector<std::vector<std::size_t>>> enumerate_partitions(std::size_t users,
                                                                        std::size_t group_size) {
  if (group_size == 0) throw std::invalid_argument("enumerate_partitions: group size must be >= 1");
  if (users > 30) throw std::invalid_argument("enumerate_partitions: too many users");
  std::vector<std::vector<std::vector<std::size_t>>> out;
  if (users == 0) return out;
  const std::uint32_t all = users == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << users) - 1;
  std::vector<std::vector<std::size_t>> current;
  enumerate_rec(all, users / group_size, users % group_size, group_size, current, out);
  return out;
}

std::size_t largest_feasible_group_size(const ChannelRealization& r) {
  check_pool(r, "largest_feasible_group_size");
  const auto ranks = user_ranks(r);
  for (std::size_t g = r.size(); g >= 1; --g) {
    if (!feasible_partitions(r, ranks, g).empty()) return g;
  }
  throw InfeasibleError("no feasible grouping arrangement exists");
}

GroupingArrangement schedule_conventional(const ChannelRealization& r, Criterion criterion,
                                          std::size_t group_size, std::size_t exhaustive_limit,
                                          const ScoreContext& ctx) {
  check_pool(r, "schedule_conventional");
  check_limit(r.size(), exhaustive_limit, "conventional grouping");
  const auto ranks = user_ranks(r);
  const std::size_t size = resolve_group_size(r, group_size);
  const auto partitions = feasible_partitions(r, ranks, size);
  if (partitions.empty()) {
    throw InfeasibleError("no BD-feasible arrangement with group size " + std::to_string(size));
  }

  GroupingArrangement out;
  if (criterion == Criterion::kRandom) {
    if (ctx.rng == nullptr) throw std::invalid_argument("random criterion needs an rng");
    std::uniform_int_distribution<std::size_t> pick(0, partitions.size() - 1);
    out.groups = partitions[pick(*ctx.rng)];
    return out;
  }

  // A group's worth depends only on its members, so it is scored once.
  std::unordered_map<std::uint32_t, double> group_value;
  auto value_of = [&](const std::vector<std::size_t>& g) {
    const std::uint32_t key = mask_of(g);
    if (auto it = group_value.find(key); it != group_value.end()) return it->second;
    double worst = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> others;
    for (std::size_t pos = 0; pos < g.size(); ++pos) {
      others.clear();
      for (std::size_t q = 0; q < g.size(); ++q) {
        if (q != pos) others.push_back(g[q]);
      }
      worst = std::min(worst, candidate_score(criterion, r, g[pos], others, ctx));
      ++out.comparisons;
    }
    group_value.emplace(key, worst);
    return worst;
  };

  std::size_t best = 0;
  double best_value = kNegInf;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    double value = std::numeric_limits<double>::infinity();
    for (const auto& g : partitions[i]) value = std::min(value, value_of(g));
    if (i == 0 || value > best_value) {
      best = i;
      best_value = value;
    }
  }
  out.groups = partitions[best];
  return out;
}

GroupingArrangement exhaustive_select(const ChannelRealization& r, PowerPolicy policy,
                                      double total_power, double noise_variance,
                                      std::size_t exhaustive_limit) {
  check_pool(r, "exhaustive_select");
  check_limit(r.size(), exhaustive_limit, "exhaustive selection");
  const auto ranks = user_ranks(r);
  GroupingArrangement out;
  std::vector<std::size_t> best_members;
  double best_capacity = kNegInf;
  std::vector<std::size_t> members;
  const std::uint32_t end = std::uint32_t{1} << r.size();
  for (std::uint32_t mask = 1; mask < end; ++mask) {
    members.clear();
    for (std::size_t u = 0; u < r.size(); ++u) {
      if (mask & (std::uint32_t{1} << u)) members.push_back(u);
    }
    if (rank_sum(ranks, members) > r.transmit_antennas) continue;
    const double c = group_sum_capacity(r, members, policy, total_power, noise_variance);
    ++out.comparisons;
    if (c > best_capacity) {
      best_capacity = c;
      best_members = members;
    }
  }
  out.groups.push_back(std::move(best_members));
  return out;
}

GroupingArrangement exhaustive_grouping(const ChannelRealization& r, std::size_t group_size,
                                        PowerPolicy policy, double total_power,
                                        double noise_variance, std::size_t exhaustive_limit) {
  check_pool(r, "exhaustive_grouping");
  check_limit(r.size(), exhaustive_limit, "exhaustive grouping");
  const auto ranks = user_ranks(r);
  const std::size_t size = resolve_group_size(r, group_size);
  const auto partitions = feasible_partitions(r, ranks, size);
  if (partitions.empty()) {
    throw InfeasibleError("no BD-feasible arrangement with group size " + std::to_string(size));
  }
  GroupingArrangement out;
  std::unordered_map<std::uint32_t, double> capacity;
  std::size_t best = 0;
  double best_value = kNegInf;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    double total = 0.0;
    for (const auto& g : partitions[i]) {
      const std::uint32_t key = mask_of(g);
      auto it = capacity.find(key);
      if (it == capacity.end()) {
        it = capacity.emplace(key, group_sum_capacity(r, g, policy, total_power, noise_variance))
                 .first;
        ++out.comparisons;
      }
      total += it->second;
    }
    const double average = total / static_cast<double>(partitions[i].size());
    if (average > best_value) {
      best = i;
      best_value = average;
    }
  }
  out.groups = partitions[best];
  return out;
}

GroupingArrangement random_schedule(const ChannelRealization& r, std::mt19937_64& rng) {
  check_pool(r, "random_schedule");
  const auto ranks = user_ranks(r);
  std::vector<bool> taken(r.size(), false);
  std::vector<std::size_t> selected;
  std::uniform_int_distribution<std::size_t> first(0, r.size() - 1);
  selected.push_back(first(rng));
  taken[selected.front()] = true;
  while (true) {
    const Index used = rank_sum(ranks, selected);
    std::vector<std::size_t> fits;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!taken[k] && used + ranks[k] <= r.transmit_antennas) fits.push_back(k);
    }
    if (fits.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, fits.size() - 1);
    const std::size_t k = fits[pick(rng)];
    selected.push_back(k);
    taken[k] = true;
  }
  GroupingArrangement out;
  out.groups.push_back(std::move(selected));
  return out;
}

GroupingArrangement run_scheduler(Scheduler s, const ChannelRealization& r,
                                  const SchedulerOptions& options) {
  const ScoreContext ctx{options.snr_scale, options.rng};
  switch (s) {
    case Scheduler::kGreedySelection:
      return greedy_select(r, options.criterion, ctx);
    case Scheduler::kAlgorithm1:
      return schedule_algorithm1(r, options.criterion, ctx);
    case Scheduler::kAlgorithm2:
      return schedule_algorithm2(r, options.criterion, ctx);
    case Scheduler::kConventionalGrouping:
      return schedule_conventional(r, options.criterion, options.group_size,
                                   options.exhaustive_limit, ctx);
    case Scheduler::kExhaustiveSelection:
      return exhaustive_select(r, options.power_policy, options.total_power,
                               options.noise_variance, options.exhaustive_limit);
    case Scheduler::kExhaustiveGrouping:
      return exhaustive_grouping(r, options.group_size, options.power_policy, options.total_power,
                                 options.noise_variance, options.exhaustive_limit);
    case Scheduler::kRandom:
      if (options.rng == nullptr) throw std::invalid_argument("random scheduler needs an rng");
      return random_schedule(r, *options.rng);
  }
  throw std::invalid_argument("unknown scheduler");
}

}  // namespace hetsched
