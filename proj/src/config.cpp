#include "hetsched/config.hpp"

#include "hetsched/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace hetsched {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!token.empty()) out.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(ch);
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
  return out;
}

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::size_t line_;
};

template <typename T>
T parse_number(std::string_view text, const LineError& where, std::string_view key) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    where.fail("'" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, const LineError& where, std::string_view key) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  where.fail("'" + std::string(key) + "' expects true or false");
}

template <typename T>
std::optional<T> parse_optional(std::string_view text, const LineError& where,
                                std::string_view key) {
  if (text == "random") return std::nullopt;
  return parse_number<T>(text, where, key);
}

}  // namespace

ExperimentSpec parse_config(std::string_view text) {
  ExperimentSpec spec;
  Scenario& sc = spec.scenario;
  bool users_seen = false;
  std::string section;

  using Handler = std::function<void(std::string_view, const LineError&)>;
  const std::map<std::string, std::map<std::string, Handler>> handlers{
      {"scenario",
       {
           {"transmit_antennas",
            [&](auto v, auto& w) { sc.transmit_antennas = parse_number<int>(v, w, "transmit_antennas"); }},
           {"noise_variance",
            [&](auto v, auto& w) { sc.noise_variance = parse_number<double>(v, w, "noise_variance"); }},
           {"path_loss_exponent",
            [&](auto v, auto& w) {
              sc.path_loss_exponent = parse_number<double>(v, w, "path_loss_exponent");
            }},
           {"reference_distance",
            [&](auto v, auto& w) {
              sc.reference_distance = parse_number<double>(v, w, "reference_distance");
            }},
           {"max_distance",
            [&](auto v, auto& w) { sc.max_distance = parse_number<double>(v, w, "max_distance"); }},
           {"max_receive_antennas",
            [&](auto v, auto& w) {
              sc.max_receive_antennas = parse_number<int>(v, w, "max_receive_antennas");
            }},
           {"snr_db",
            [&](auto v, auto& w) {
              sc.snr_db.clear();
              for (const auto& t : split_list(v)) sc.snr_db.push_back(parse_number<double>(t, w, "snr_db"));
            }},
           {"trials",
            [&](auto v, auto& w) { sc.trials = parse_number<std::size_t>(v, w, "trials"); }},
           {"seed", [&](auto v, auto& w) { sc.seed = parse_number<std::uint64_t>(v, w, "seed"); }},
           {"redraw_per_trial",
            [&](auto v, auto& w) { sc.redraw_per_trial = parse_bool(v, w, "redraw_per_trial"); }},
       }},
      {"users",
       {
           {"user",
            [&](auto v, auto& w) {
              const auto tokens = split_list(v);
              if (tokens.size() != 4) {
                w.fail("'user' expects: antennas distance rx_correlation tx_correlation");
              }
              UserProfile p;
              p.antennas = parse_optional<int>(tokens[0], w, "antennas");
              p.distance = parse_optional<double>(tokens[1], w, "distance");
              p.rx_correlation = parse_optional<double>(tokens[2], w, "rx_correlation");
              p.tx_correlation = parse_optional<double>(tokens[3], w, "tx_correlation");
              sc.users.push_back(p);
              users_seen = true;
            }},
           {"random",
            [&](auto v, auto& w) {
              const auto n = parse_number<std::size_t>(v, w, "random");
              sc.users.insert(sc.users.end(), n, UserProfile{});
              users_seen = true;
            }},
       }},
      {"experiment",
       {
           {"name", [&](auto v, auto&) { spec.name = std::string(v); }},
           {"schedulers",
            [&](auto v, auto& w) {
              spec.schedulers.clear();
              for (const auto& t : split_list(v)) {
                try {
                  spec.schedulers.push_back(parse_scheduler(t));
                } catch (const ConfigError& e) {
                  w.fail(e.what());
                }
              }
            }},
           {"criteria",
            [&](auto v, auto& w) {
              spec.criteria.clear();
              for (const auto& t : split_list(v)) {
                try {
                  spec.criteria.push_back(parse_criterion(t));
                } catch (const ConfigError& e) {
                  w.fail(e.what());
                }
              }
            }},
           {"power_policy",
            [&](auto v, auto& w) {
              try {
                spec.power_policy = parse_power_policy(v);
              } catch (const ConfigError& e) {
                w.fail(e.what());
              }
            }},
           {"outage_level",
            [&](auto v, auto& w) { spec.outage_level = parse_number<double>(v, w, "outage_level"); }},
           {"group_size",
            [&](auto v, auto& w) {
              spec.group_size = v == "auto" ? 0 : parse_number<std::size_t>(v, w, "group_size");
              if (v != "auto" && spec.group_size == 0) w.fail("group_size must be >= 1 or auto");
            }},
           {"exhaustive_limit",
            [&](auto v, auto& w) {
              spec.exhaustive_limit = parse_number<std::size_t>(v, w, "exhaustive_limit");
            }},
           {"capacity_report",
            [&](auto v, auto& w) {
              try {
                spec.capacity_report = parse_capacity_report(v);
              } catch (const ConfigError& e) {
                w.fail(e.what());
              }
            }},
           {"output", [&](auto v, auto&) { spec.output = std::string(v); }},
           {"format",
            [&](auto v, auto& w) {
              try {
                spec.format = parse_output_format(v);
              } catch (const ConfigError& e) {
                w.fail(e.what());
              }
            }},
       }},
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineError where(line_no);
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') where.fail("malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!handlers.contains(section)) where.fail("unknown section [" + section + "]");
      continue;
    }
    if (section.empty()) where.fail("key outside of a section");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) where.fail("expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& keys = handlers.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) where.fail("unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) where.fail("empty value for '" + key + "'");
    it->second(value, where);
  }
  if (!users_seen) throw ConfigError("config has no [users] entries");
  validate_spec(spec);
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace hetsched
