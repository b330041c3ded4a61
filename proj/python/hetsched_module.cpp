#include "hetsched/channel.hpp"
#include "hetsched/config.hpp"
#include "hetsched/criteria.hpp"
#include "hetsched/errors.hpp"
#include "hetsched/harness.hpp"
#include "hetsched/precoding.hpp"
#include "hetsched/schedulers.hpp"
#include "hetsched/subspace.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

namespace py = pybind11;
using namespace hetsched;

namespace {

py::dict record_to_dict(const OutageRecord& r) {
  py::dict d;
  d["scheduler"] = std::string(to_string(r.scheduler));
  d["criterion"] = std::string(to_string(r.criterion));
  d["snr_db"] = r.snr_db;
  d["outage_capacity"] = r.outage_capacity;
  d["mean_capacity"] = r.mean_capacity;
  d["trials"] = r.trials;
  d["comparisons_mean"] = r.comparisons_mean;
  d["samples"] = r.samples;
  return d;
}

ChannelRealization realization_from(const std::vector<ComplexMatrix>& channels,
                                    const std::vector<double>& powers) {
  return ChannelRealization::from_channels(channels, powers);
}

GroupingArrangement schedule(const std::string& scheduler, const ChannelRealization& r,
                             const std::string& criterion, double snr_db, std::size_t group_size,
                             std::uint64_t seed, const std::string& power_policy,
                             double noise_variance) {
  std::mt19937_64 rng(seed);
  SchedulerOptions opt;
  opt.criterion = parse_criterion(criterion);
  opt.snr_scale = criterion_snr_scale(snr_db, static_cast<int>(r.transmit_antennas));
  opt.rng = &rng;
  opt.group_size = group_size;
  opt.power_policy = parse_power_policy(power_policy);
  opt.total_power = total_power_for(snr_db, noise_variance);
  opt.noise_variance = noise_variance;
  return run_scheduler(parse_scheduler(scheduler), r, opt);
}

}  // namespace

PYBIND11_MODULE(_hetsched, m) {
  m.doc() = "Subspace-based user scheduling for heterogeneous multiuser MIMO";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  py::class_<ChannelRealization>(m, "Realization")
      .def(py::init(&realization_from), py::arg("channels"),
           py::arg("received_powers") = std::vector<double>{},
           "Build from normalized channel matrices (rows are receive antennas).")
      .def_readonly("transmit_antennas", &ChannelRealization::transmit_antennas)
      .def("__len__", &ChannelRealization::size)
      .def("channel", [](const ChannelRealization& r, std::size_t k) { return r.users.at(k).channel; })
      .def("normalized", [](const ChannelRealization& r, std::size_t k) { return r.users.at(k).normalized; })
      .def("received_power", [](const ChannelRealization& r, std::size_t k) { return r.users.at(k).received_power; })
      .def("antennas", [](const ChannelRealization& r, std::size_t k) { return r.users.at(k).antennas(); });

  py::class_<GroupingArrangement>(m, "Arrangement")
      .def_readonly("groups", &GroupingArrangement::groups)
      .def_readonly("comparisons", &GroupingArrangement::comparisons)
      .def("scheduled_users", &GroupingArrangement::scheduled_users)
      .def("__repr__", [](const GroupingArrangement& a) {
        std::ostringstream s;
        s << "Arrangement(" << a.groups.size() << " groups, " << a.comparisons << " comparisons)";
        return s.str();
      });

  py::class_<ExperimentSpec>(m, "Experiment")
      .def_static("from_config", &parse_config, py::arg("text"), "Parse config file contents.")
      .def_static("from_file", &load_config, py::arg("path"))
      .def_static(
          "preset",
          [](const std::string& name, std::optional<std::size_t> trials,
             std::optional<std::uint64_t> seed, std::optional<std::size_t> users) {
            return figure_preset(name, PresetOptions{trials, seed, users});
          },
          py::arg("name"), py::arg("trials") = py::none(), py::arg("seed") = py::none(),
          py::arg("users") = py::none())
      .def_readonly("name", &ExperimentSpec::name)
      .def_property_readonly("transmit_antennas", [](const ExperimentSpec& s) { return s.scenario.transmit_antennas; })
      .def_property_readonly("snr_db", [](const ExperimentSpec& s) { return s.scenario.snr_db; })
      .def_property_readonly("trials", [](const ExperimentSpec& s) { return s.scenario.trials; })
      .def_property_readonly("seed", [](const ExperimentSpec& s) { return s.scenario.seed; })
      .def("validate", &validate_spec, "Raise ConfigError when invalid; return warnings.")
      .def("realization", [](const ExperimentSpec& s, std::uint64_t trial) {
        return generate_realization(s.scenario, trial);
      }, py::arg("trial"))
      .def("to_json", &spec_to_json)
      .def_static("from_json", &spec_from_json, py::arg("text"))
      .def(
          "run",
          [](const ExperimentSpec& s, unsigned threads) {
            OutageSummary summary;
            {
              py::gil_scoped_release release;
              summary = run_experiment(s, threads);
            }
            py::list out;
            for (const auto& r : summary.records) out.append(record_to_dict(r));
            return out;
          },
          py::arg("threads") = 0, "Run every trial; one dict per (scheduler, criterion, SNR).")
      .def(
          "run_csv",
          [](const ExperimentSpec& s, unsigned threads) {
            OutageSummary summary;
            {
              py::gil_scoped_release release;
              summary = run_experiment(s, threads);
            }
            std::ostringstream out;
            write_csv(summary, out);
            return out.str();
          },
          py::arg("threads") = 0);

  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (auto n : preset_names()) names.emplace_back(n);
    return names;
  });

  m.def("principal_angles",
        [](const ComplexMatrix& a, const ComplexMatrix& b) {
          return principal_angles(row_space_basis(a), row_space_basis(b)).angles;
        },
        py::arg("a"), py::arg("b"), "Principal angles between the row spaces, ascending.");
  m.def("chordal_distance",
        [](const ComplexMatrix& a, const ComplexMatrix& b) {
          return chordal_distance(row_space_basis(a), row_space_basis(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("geometrical_angle_cos2", &geometrical_angle_cos2, py::arg("hk"), py::arg("hj"));
  m.def("subspace_collinearity", &subspace_collinearity, py::arg("hk"), py::arg("hj"));
  m.def("numerical_rank", [](const ComplexMatrix& h) { return numerical_rank(h); }, py::arg("h"));

  m.def("waterfill", [](const std::vector<double>& gains, double budget) { return waterfill(gains, budget); },
        py::arg("gains"), py::arg("budget"));
  m.def(
      "group_capacity",
      [](const ChannelRealization& r, const std::vector<std::size_t>& members,
         const std::string& policy, double total_power, double noise_variance) {
        return group_capacity(r, members, parse_power_policy(policy), total_power, noise_variance)
            .per_user;
      },
      py::arg("realization"), py::arg("members"), py::arg("power_policy") = "waterfilling",
      py::arg("total_power") = 1.0, py::arg("noise_variance") = 1.0,
      "Per-user BD capacities in bits/s/Hz, member order.");
  m.def(
      "capacity_bounds",
      [](const ChannelRealization& r, const std::vector<std::size_t>& members,
         std::size_t position, double total_power, double noise_variance) {
        const auto b = capacity_bounds(r, members, position, total_power, noise_variance);
        py::dict d;
        d["lower"] = b.lower;
        d["exact"] = b.exact;
        d["upper"] = b.upper;
        d["sin2_sum"] = b.sin2_sum;
        return d;
      },
      py::arg("realization"), py::arg("members"), py::arg("position"), py::arg("total_power"),
      py::arg("noise_variance") = 1.0);

  m.def("criteria", [] {
    std::vector<std::string> names;
    for (auto c : all_criteria()) names.emplace_back(to_string(c));
    return names;
  });
  m.def("schedulers", [] {
    std::vector<std::string> names;
    for (auto s : all_schedulers()) names.emplace_back(to_string(s));
    return names;
  });
  m.def(
      "candidate_score",
      [](const std::string& criterion, const ChannelRealization& r, std::size_t candidate,
         const std::vector<std::size_t>& subset, double snr_scale, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return candidate_score(parse_criterion(criterion), r, candidate, subset,
                               ScoreContext{snr_scale, &rng});
      },
      py::arg("criterion"), py::arg("realization"), py::arg("candidate"), py::arg("subset"),
      py::arg("snr_scale") = 1.0, py::arg("seed") = 0, "Oriented score: larger is better.");
  m.def(
      "delta_capacity",
      [](const ChannelRealization& r, std::size_t candidate, const std::vector<std::size_t>& subset,
         double snr_scale) {
        const auto rep = delta_capacity(r, candidate, subset, snr_scale);
        py::dict d;
        d["c_gain"] = rep.c_gain;
        d["c_loss"] = rep.c_loss;
        d["delta"] = rep.delta;
        return d;
      },
      py::arg("realization"), py::arg("candidate"), py::arg("subset"), py::arg("snr_scale"));
  m.def("schedule", &schedule, py::arg("scheduler"), py::arg("realization"),
        py::arg("criterion") = "selection-simplified", py::arg("snr_db") = 30.0,
        py::arg("group_size") = 0, py::arg("seed") = 0, py::arg("power_policy") = "waterfilling",
        py::arg("noise_variance") = 1.0);

  m.def("outage_quantile",
        [](const std::vector<double>& samples, double level) { return outage_quantile(samples, level); },
        py::arg("samples"), py::arg("level") = 0.10);
  m.def("total_power_for", &total_power_for, py::arg("snr_db"), py::arg("noise_variance") = 1.0);
  m.def("criterion_snr_scale", &criterion_snr_scale, py::arg("snr_db"),
        py::arg("transmit_antennas"));
}
