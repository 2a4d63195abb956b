#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphon/estimators.hpp"
#include "graphon/model.hpp"

namespace graphon {

enum class Scenario { SbmRate, GraphonRate, BiasDecay, Completion, Opnorm, LowerboundAudit };

std::string to_string(Scenario scenario);
Scenario parse_scenario(std::string_view name);

enum class FitMethod { Oracle, Alternating, Exact };

std::string to_string(FitMethod method);
FitMethod parse_fit_method(std::string_view name);

/// k value meaning "ceil(n^(1 / (min(alpha, 1) + 1)))".
inline constexpr int kAutoK = 0;

struct ExperimentConfig {
  Scenario scenario = Scenario::SbmRate;
  std::vector<Index> n;
  std::vector<int> k;
  std::vector<std::string> graphon;
  std::vector<double> beta{1.0};
  std::vector<double> omega_fraction{1.0};
  int replicates = 1;
  std::uint64_t base_seed = 0;

  FitMethod method = FitMethod::Alternating;
  FitOptions fit;
  OracleRule oracle_rule = OracleRule::Interval;
  DesignSpec design{DesignKind::FixedGrid, {}};

  double min_fraction = 0.05;     // completion floor on |Omega| / n^2
  double trim_multiplier = 0.0;   // opnorm: trim A before the norm when > 0
  double power_tolerance = 1e-8;  // operator_norm tolerance
  double c1 = 0.1;                // lowerbound-audit constants
  double c2 = 0.1;
  double band = 0.3;              // report: allowed |slope - theory|

  int workers = 1;
  std::string output;

  /// Throws FormatError on an inconsistent configuration, including a seed
  /// collision across (grid point, replicate).
  void validate() const;
};

/// Parses the key = value format. Lists are written [a, b, c]; strings may be
/// quoted; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Sets one key from its textual value, as a config line would.
void apply_override(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Seed of replicate r at grid point g: derive_seed(base_seed, (g << 32) | r).
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t grid_index, int replicate);

}  // namespace graphon
