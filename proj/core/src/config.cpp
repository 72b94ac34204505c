#include "cdsim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace cdsim {

std::string_view to_string(RouteMode mode) {
  return mode == RouteMode::Cds ? "cds" : "flooding";
}

RouteMode parse_route_mode(std::string_view text) {
  if (text == "cds") return RouteMode::Cds;
  if (text == "flooding") return RouteMode::Flooding;
  throw Error("unknown route mode '" + std::string(text) + "'");
}

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : Error(line > 0 ? "config line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

struct FieldError {
  std::string message;
};

double to_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw FieldError{"'" + std::string(text) + "' is not a number"};
  }
  return value;
}

std::uint64_t to_unsigned(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FieldError{"'" + std::string(text) + "' is not a non-negative integer"};
  }
  return value;
}

double positive(std::string_view text) {
  const double v = to_double(text);
  if (!(v > 0.0)) throw FieldError{"value must be positive"};
  return v;
}

double non_negative(std::string_view text) {
  const double v = to_double(text);
  if (v < 0.0) throw FieldError{"value must not be negative"};
  return v;
}

std::size_t positive_count(std::string_view text) {
  const auto v = to_unsigned(text);
  if (v == 0) throw FieldError{"value must be positive"};
  return static_cast<std::size_t>(v);
}

std::vector<std::uint64_t> seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(to_unsigned(item));
      continue;
    }
    const auto lo = to_unsigned(trim(item.substr(0, dots)));
    const auto hi = to_unsigned(trim(item.substr(dots + 2)));
    if (hi < lo) throw FieldError{"empty seed range"};
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& render) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += render(items[i]);
  }
  return out;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"area_width", [](ScenarioConfig& c, std::string_view v) { c.area.width = positive(v); }},
      {"area_height", [](ScenarioConfig& c, std::string_view v) { c.area.height = positive(v); }},
      {"nodes",
       [](ScenarioConfig& c, std::string_view v) {
         c.node_counts.clear();
         for (auto item : split_list(v)) c.node_counts.push_back(positive_count(item));
       }},
      {"range", [](ScenarioConfig& c, std::string_view v) { c.range = positive(v); }},
      {"vmax",
       [](ScenarioConfig& c, std::string_view v) {
         c.v_max.clear();
         for (auto item : split_list(v)) c.v_max.push_back(positive(item));
       }},
      {"pause", [](ScenarioConfig& c, std::string_view v) { c.pause = non_negative(v); }},
      {"energy_min", [](ScenarioConfig& c, std::string_view v) { c.energy_min = positive(v); }},
      {"energy_max", [](ScenarioConfig& c, std::string_view v) { c.energy_max = positive(v); }},
      {"tx_power", [](ScenarioConfig& c, std::string_view v) { c.power.tx_w = positive(v); }},
      {"rx_power", [](ScenarioConfig& c, std::string_view v) { c.power.rx_w = positive(v); }},
      {"idle_power", [](ScenarioConfig& c, std::string_view v) { c.power.idle_w = positive(v); }},
      {"bitrate", [](ScenarioConfig& c, std::string_view v) { c.bitrate = positive(v); }},
      {"duration", [](ScenarioConfig& c, std::string_view v) { c.duration = positive(v); }},
      {"hello_interval",
       [](ScenarioConfig& c, std::string_view v) { c.hello_interval = positive(v); }},
      {"recompute_interval",
       [](ScenarioConfig& c, std::string_view v) { c.recompute_interval = positive(v); }},
      {"mobility_step", [](ScenarioConfig& c, std::string_view v) { c.mobility_step = positive(v); }},
      {"flows", [](ScenarioConfig& c, std::string_view v) { c.flows = positive_count(v); }},
      {"packet_rate", [](ScenarioConfig& c, std::string_view v) { c.packet_rate = positive(v); }},
      {"packet_size", [](ScenarioConfig& c, std::string_view v) { c.packet_size = positive_count(v); }},
      {"hello_size", [](ScenarioConfig& c, std::string_view v) { c.hello_size = positive_count(v); }},
      {"hello_neighbor_size",
       [](ScenarioConfig& c, std::string_view v) {
         c.hello_neighbor_size = static_cast<std::size_t>(to_unsigned(v));
       }},
      {"control_size",
       [](ScenarioConfig& c, std::string_view v) { c.control_size = positive_count(v); }},
      {"seeds", [](ScenarioConfig& c, std::string_view v) { c.seeds = seed_list(v); }},
      {"algorithms",
       [](ScenarioConfig& c, std::string_view v) {
         c.algorithms.clear();
         for (auto item : split_list(v)) {
           try {
             c.algorithms.push_back(parse_algorithm(item));
           } catch (const Error& e) {
             throw FieldError{e.what()};
           }
         }
       }},
      {"mode",
       [](ScenarioConfig& c, std::string_view v) {
         if (v == "both") {
           c.modes = {RouteMode::Cds, RouteMode::Flooding};
           return;
         }
         try {
           c.modes = {parse_route_mode(v)};
         } catch (const Error& e) {
           throw FieldError{e.what()};
         }
       }},
  };
  return table;
}

}  // namespace

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid scenario config: ") + what);
  };
  require(area.width > 0.0 && area.height > 0.0, "area must be positive");
  require(!node_counts.empty(), "node list is empty");
  for (auto n : node_counts) require(n > 0, "node counts must be positive");
  require(range > 0.0, "range must be positive");
  require(!v_max.empty(), "vmax list is empty");
  for (double v : v_max) require(v >= 0.0, "vmax must not be negative");
  require(pause >= 0.0, "pause must not be negative");
  require(energy_min > 0.0 && energy_max >= energy_min, "energy range must be positive and ordered");
  require(power.tx_w > 0.0 && power.rx_w > 0.0 && power.idle_w > 0.0, "power ratings must be positive");
  require(bitrate > 0.0, "bitrate must be positive");
  require(duration >= 0.0, "duration must not be negative");
  require(hello_interval > 0.0, "hello_interval must be positive");
  require(recompute_interval > 0.0, "recompute_interval must be positive");
  require(mobility_step > 0.0, "mobility_step must be positive");
  require(packet_rate > 0.0, "packet_rate must be positive");
  require(packet_size > 0 && hello_size > 0 && control_size > 0, "packet sizes must be positive");
  require(!seeds.empty(), "seed list is empty");
  require(!algorithms.empty(), "algorithm list is empty");
  require(!modes.empty(), "mode list is empty");
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig config;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos <= text.size();) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(line_no, "expected 'key = value'");

    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
    try {
      it->second(config, value);
    } catch (const FieldError& e) {
      throw ConfigError(line_no, std::string(key) + ": " + e.message);
    }
  }
  if (config.energy_max < config.energy_min) {
    throw ConfigError(0, "energy_max must not be below energy_min");
  }
  return config;
}

std::string format_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "area_width = " << fmt(c.area.width) << '\n';
  out << "area_height = " << fmt(c.area.height) << '\n';
  out << "nodes = " << join(c.node_counts, [](std::size_t n) { return std::to_string(n); }) << '\n';
  out << "range = " << fmt(c.range) << '\n';
  out << "vmax = " << join(c.v_max, fmt) << '\n';
  out << "pause = " << fmt(c.pause) << '\n';
  out << "energy_min = " << fmt(c.energy_min) << '\n';
  out << "energy_max = " << fmt(c.energy_max) << '\n';
  out << "tx_power = " << fmt(c.power.tx_w) << '\n';
  out << "rx_power = " << fmt(c.power.rx_w) << '\n';
  out << "idle_power = " << fmt(c.power.idle_w) << '\n';
  out << "bitrate = " << fmt(c.bitrate) << '\n';
  out << "duration = " << fmt(c.duration) << '\n';
  out << "hello_interval = " << fmt(c.hello_interval) << '\n';
  out << "recompute_interval = " << fmt(c.recompute_interval) << '\n';
  out << "mobility_step = " << fmt(c.mobility_step) << '\n';
  out << "flows = " << c.flows << '\n';
  out << "packet_rate = " << fmt(c.packet_rate) << '\n';
  out << "packet_size = " << c.packet_size << '\n';
  out << "hello_size = " << c.hello_size << '\n';
  out << "hello_neighbor_size = " << c.hello_neighbor_size << '\n';
  out << "control_size = " << c.control_size << '\n';
  out << "seeds = " << join(c.seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\n';
  out << "algorithms = "
      << join(c.algorithms, [](Algorithm a) { return std::string(to_string(a)); }) << '\n';
  if (c.modes.size() == 2 && c.modes[0] == RouteMode::Cds && c.modes[1] == RouteMode::Flooding) {
    out << "mode = both\n";
  } else {
    out << "mode = " << to_string(c.modes.front()) << '\n';
  }
  return out.str();
}

}  // namespace cdsim
