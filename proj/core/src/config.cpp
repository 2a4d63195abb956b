#include "graphon/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "graphon/error.hpp"
#include "graphon/graphon.hpp"
#include "graphon/rng.hpp"

namespace graphon {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return std::string(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

// Drops a '#' comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::vector<std::string> items(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value.empty()) throw FormatError("config key '" + std::string(key) + "': missing value");
  if (value.front() != '[') return {unquote(value)};
  if (value.back() != ']') throw FormatError("config key '" + std::string(key) + "': unterminated list");
  value = trim(value.substr(1, value.size() - 2));
  std::vector<std::string> out;
  if (value.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = value.find(',', start);
    out.push_back(unquote(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string single(std::string_view key, std::string_view value) {
  auto list = items(key, value);
  if (list.size() != 1) throw FormatError("config key '" + std::string(key) + "' takes a single value");
  return list.front();
}

template <typename T>
T number(std::string_view key, const std::string& text) {
  T v{};
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw FormatError("config key '" + std::string(key) + "': bad number '" + text + "'");
  }
  return v;
}

template <typename T>
std::vector<T> numbers(std::string_view key, std::string_view value) {
  std::vector<T> out;
  for (const auto& item : items(key, value)) out.push_back(number<T>(key, item));
  return out;
}

}  // namespace

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::SbmRate:
      return "sbm-rate";
    case Scenario::GraphonRate:
      return "graphon-rate";
    case Scenario::BiasDecay:
      return "bias-decay";
    case Scenario::Completion:
      return "completion";
    case Scenario::Opnorm:
      return "opnorm";
    case Scenario::LowerboundAudit:
      return "lowerbound-audit";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (auto s : {Scenario::SbmRate, Scenario::GraphonRate, Scenario::BiasDecay, Scenario::Completion,
                 Scenario::Opnorm, Scenario::LowerboundAudit}) {
    if (to_string(s) == name) return s;
  }
  throw FormatError("unknown scenario '" + std::string(name) + "'");
}

std::string to_string(FitMethod method) {
  switch (method) {
    case FitMethod::Oracle:
      return "oracle";
    case FitMethod::Alternating:
      return "alternating";
    case FitMethod::Exact:
      return "exact";
  }
  return "unknown";
}

FitMethod parse_fit_method(std::string_view name) {
  if (name == "oracle") return FitMethod::Oracle;
  if (name == "alternating") return FitMethod::Alternating;
  if (name == "exact") return FitMethod::Exact;
  throw FormatError("unknown method '" + std::string(name) + "'");
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t grid_index, int replicate) {
  return derive_seed(base_seed, (static_cast<std::uint64_t>(grid_index) << 32) |
                                    static_cast<std::uint32_t>(replicate));
}

void apply_override(ExperimentConfig& c, std::string_view key, std::string_view value) {
  if (key == "scenario") {
    c.scenario = parse_scenario(single(key, value));
  } else if (key == "n") {
    c.n.clear();
    for (auto v : numbers<long long>(key, value)) c.n.push_back(static_cast<Index>(v));
  } else if (key == "k") {
    c.k.clear();
    for (const auto& item : items(key, value)) c.k.push_back(item == "auto" ? kAutoK : number<int>(key, item));
  } else if (key == "graphon") {
    c.graphon = items(key, value);
  } else if (key == "beta") {
    c.beta = numbers<double>(key, value);
  } else if (key == "omega_fraction") {
    c.omega_fraction = numbers<double>(key, value);
  } else if (key == "replicates") {
    c.replicates = number<int>(key, single(key, value));
  } else if (key == "base_seed") {
    c.base_seed = number<std::uint64_t>(key, single(key, value));
  } else if (key == "method") {
    c.method = parse_fit_method(single(key, value));
  } else if (key == "restarts") {
    c.fit.restarts = number<int>(key, single(key, value));
  } else if (key == "max_iterations") {
    c.fit.max_iterations = number<int>(key, single(key, value));
  } else if (key == "tolerance") {
    c.fit.tolerance = number<double>(key, single(key, value));
  } else if (key == "init") {
    const auto v = single(key, value);
    if (v == "spectral") {
      c.fit.init = InitMethod::Spectral;
    } else if (v == "random") {
      c.fit.init = InitMethod::Random;
    } else {
      throw FormatError("config key 'init': expected spectral or random");
    }
  } else if (key == "design") {
    c.design = DesignSpec::parse(single(key, value));
  } else if (key == "oracle_rule") {
    const auto v = single(key, value);
    if (v == "interval") {
      c.oracle_rule = OracleRule::Interval;
    } else if (v == "quantile") {
      c.oracle_rule = OracleRule::SortedQuantile;
    } else {
      throw FormatError("config key 'oracle_rule': expected interval or quantile");
    }
  } else if (key == "min_fraction") {
    c.min_fraction = number<double>(key, single(key, value));
  } else if (key == "trim_multiplier") {
    c.trim_multiplier = number<double>(key, single(key, value));
  } else if (key == "power_tolerance") {
    c.power_tolerance = number<double>(key, single(key, value));
  } else if (key == "c1") {
    c.c1 = number<double>(key, single(key, value));
  } else if (key == "c2") {
    c.c2 = number<double>(key, single(key, value));
  } else if (key == "band") {
    c.band = number<double>(key, single(key, value));
  } else if (key == "workers") {
    c.workers = number<int>(key, single(key, value));
  } else if (key == "output") {
    c.output = single(key, value);
  } else {
    throw FormatError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_override(config, trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const FormatError& e) {
      throw FormatError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw FormatError("config: " + msg); };
  if (n.empty()) fail("n grid is empty");
  if (k.empty()) fail("k grid is empty");
  if (graphon.empty() && scenario != Scenario::LowerboundAudit) fail("graphon grid is empty");
  if (beta.empty() || omega_fraction.empty()) fail("beta and omega_fraction grids must be nonempty");
  if (replicates < 1) fail("replicates must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  try {
    fit.validate();
  } catch (const DomainError& e) {
    fail(e.what());
  }
  if (fit.init == InitMethod::Given) fail("init = given is not available in sweeps");
  for (auto v : n) {
    if (v < 2) fail("every n must be >= 2");
    for (int kv : k) {
      if (kv < 0) fail("k must be positive or auto");
      if (kv != kAutoK && kv > v) fail("k = " + std::to_string(kv) + " exceeds n = " + std::to_string(v));
    }
    if (method == FitMethod::Exact && static_cast<std::size_t>(v) > kExactMaxNodes) {
      fail("method = exact needs n <= " + std::to_string(kExactMaxNodes));
    }
  }
  for (const auto& id : graphon) parse_graphon(id);
  for (double b : beta) {
    if (!(b > 0.0 && b <= 1.0)) fail("beta must lie in (0, 1]");
  }
  for (double f : omega_fraction) {
    if (!(f > 0.0)) fail("omega_fraction must be positive");
  }
  if (!(min_fraction >= 0.0)) fail("min_fraction must be >= 0");
  if (!(trim_multiplier >= 0.0)) fail("trim_multiplier must be >= 0");
  if (!(power_tolerance > 0.0)) fail("power_tolerance must be positive");
  if (!(band > 0.0)) fail("band must be positive");
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) fail("c1 and c2 must be >= 0");

  const std::size_t points = n.size() * k.size() * std::max<std::size_t>(graphon.size(), 1) * beta.size() *
                             omega_fraction.size();
  std::vector<std::uint64_t> seeds;
  seeds.reserve(points * static_cast<std::size_t>(replicates));
  for (std::size_t g = 0; g < points; ++g) {
    for (int r = 0; r < replicates; ++r) seeds.push_back(replicate_seed(base_seed, g, r));
  }
  std::sort(seeds.begin(), seeds.end());
  if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end()) fail("replicate seed collision");
}

}  // namespace graphon
