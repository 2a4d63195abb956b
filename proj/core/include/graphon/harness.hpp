#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphon/config.hpp"

namespace graphon {

/// One row per (grid point, replicate). Failed replicates keep their row with
/// NaN metrics and a status other than "ok".
///
/// lowerbound-audit rows reuse the metric columns: mse holds the smallest T1
/// distance ratio, op_norm_sq the smallest T2 separation ratio, objective the
/// number of violated inequalities.
struct ResultRecord {
  std::string scenario;
  std::string method;
  Index n = 0;
  int k = 0;
  std::string graphon;
  double beta = 1.0;
  double omega_fraction = 1.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double mse = 0.0;
  double op_norm_sq = 0.0;
  double objective = 0.0;
  double wall_time = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct GridPoint {
  Index n = 0;
  int k = 0;  // kAutoK allowed
  std::string graphon;
  double beta = 1.0;
  double omega_fraction = 1.0;
};

/// Grid points in output order: n outermost, then k, graphon, beta, omega_fraction.
std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

/// ceil(n^(1 / (min(alpha, 1) + 1))), clamped to [1, n].
int auto_k(Index n, double alpha);

/// Runs every grid point x replicate; rows come back in grid order whatever the
/// worker count.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

/// Validates the config, opens config.output (FormatError if unwritable), runs,
/// and writes the CSV.
std::vector<ResultRecord> run_sweep(const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader =
    "scenario,method,n,k,graphon,beta,omega_fraction,replicate,seed,mse,op_norm_sq,objective,wall_time,status";

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_results_csv(std::istream& in);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t points = 0;
};

/// OLS of log(mean y per x) on log x over the "ok" rows. x_field is one of
/// n, k, beta, omega_fraction; y_field one of mse, op_norm_sq, objective, wall_time.
/// Throws DomainError for fewer than two distinct x or a nonpositive y.
RateFit rate_fit(const std::vector<ResultRecord>& records, std::string_view x_field,
                 std::string_view y_field);

/// Predicted log-log slope for a group of records; nullopt when not asserted.
std::optional<double> theory_exponent(const ResultRecord& sample);

struct ReportLine {
  std::string scenario;
  std::string group;
  std::optional<RateFit> fit;
  std::optional<double> theory;
  bool pass = false;
  std::string note;
};

std::vector<ReportLine> report_lines(const std::vector<ResultRecord>& records, double band);
std::string report(const std::vector<ResultRecord>& records, double band = 0.3);

}  // namespace graphon
