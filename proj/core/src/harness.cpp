#include "graphon/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "graphon/completion.hpp"
#include "graphon/error.hpp"
#include "graphon/graphon.hpp"
#include "graphon/lower_bounds.hpp"
#include "graphon/model.hpp"
#include "graphon/rng.hpp"
#include "graphon/spectral_metrics.hpp"

namespace graphon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kAuditT1Members = 64;
constexpr std::size_t kAuditT2Members = 4;

// Sub-streams of a replicate seed.
enum Stream : std::uint64_t { kDesign = 0, kGraph = 1, kFit = 2, kOmega = 3, kPower = 4 };

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

double op_norm_sq(const Matrix& diff, const ExperimentConfig& config, std::uint64_t seed) {
  PowerIterationOptions opts;
  opts.tolerance = config.power_tolerance;
  opts.seed = derive_seed(seed, kPower);
  const double op = operator_norm(diff, opts);
  return op * op;
}

struct Metrics {
  int k = 0;
  double mse = 0.0;
  double op_norm_sq = 0.0;
  double objective = 0.0;
};

FitResult fit_full(const ExperimentConfig& config, const Adjacency& a, const LatentDesign& design, int k,
                   std::uint64_t seed) {
  switch (config.method) {
    case FitMethod::Oracle:
      return fit_given_assignment(a, oracle_assignment(design, k, config.oracle_rule));
    case FitMethod::Exact:
      return fit_exact(a, k);
    case FitMethod::Alternating:
      break;
  }
  return fit_alternating(a, k, config.fit, derive_seed(seed, kFit));
}

Metrics run_replicate(const ExperimentConfig& config, const GridPoint& point, std::uint64_t seed) {
  if (config.scenario == Scenario::LowerboundAudit) {
    const int k = point.k == kAutoK ? 2 : point.k;
    const T1Audit t1 = audit_t1(t1_family(point.n, k, config.c1, seed, kAuditT1Members));
    const T2Audit t2 = audit_t2(t2_family(point.n, k, config.c2, seed, kAuditT2Members));
    return {k, t1.min_ratio, t2.min_ratio, static_cast<double>(t1.violations + t2.violations)};
  }

  const GraphonSpec spec = parse_graphon(point.graphon);
  const int k = point.k == kAutoK ? auto_k(point.n, spec.alpha) : point.k;
  const auto n = static_cast<std::size_t>(point.n);
  const LatentDesign design = sample_design(config.design, n, derive_seed(seed, kDesign));

  if (config.scenario == Scenario::BiasDecay) {
    // Deterministic given the design; beta is not applied.
    const ProbMatrix theta = theta_from_graphon(spec, design);
    const Assignment z = oracle_assignment(design, k, config.oracle_rule);
    const ProbMatrix projected = theta_from_blocks(block_averages(theta.matrix(), z), z);
    const double mse = block_approximation_error(spec, design, k, config.oracle_rule);
    return {k, mse, op_norm_sq(projected.matrix() - theta.matrix(), config, seed),
            mse * static_cast<double>(n) * static_cast<double>(n)};
  }

  const ProbMatrix theta = scale_to_sparsity(theta_from_graphon(spec, design), point.beta);
  Adjacency a = sample_adjacency(theta, derive_seed(seed, kGraph));

  switch (config.scenario) {
    case Scenario::Opnorm: {
      if (config.trim_multiplier > 0.0) a = trim_adjacency(a, config.trim_multiplier);
      const Matrix estimate = adjacency_op_estimator(a);
      return {k, mse_loss(estimate, theta.matrix()), op_norm_sq(estimate - theta.matrix(), config, seed), 0.0};
    }
    case Scenario::Completion: {
      const double pairs = point.omega_fraction * static_cast<double>(n) * static_cast<double>(n);
      const auto omega = sample_omega(point.n, static_cast<std::size_t>(std::llround(pairs)),
                                      derive_seed(seed, kOmega));
      const FitResult fit = fit_completion(observe(a, omega), k, {config.fit, config.min_fraction},
                                           derive_seed(seed, kFit));
      return {k, mse_loss(fit.theta_hat, theta),
              op_norm_sq(fit.theta_hat.matrix() - theta.matrix(), config, seed), fit.objective};
    }
    default: {
      const FitResult fit = fit_full(config, a, design, k, seed);
      return {k, mse_loss(fit.theta_hat, theta),
              op_norm_sq(fit.theta_hat.matrix() - theta.matrix(), config, seed), fit.objective};
    }
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line_no) {
  T v{};
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw FormatError("results csv line " + std::to_string(line_no) + ": bad field '" + text + "'");
  }
  return v;
}

double x_value(const ResultRecord& r, std::string_view field) {
  if (field == "n") return static_cast<double>(r.n);
  if (field == "k") return static_cast<double>(r.k);
  if (field == "beta") return r.beta;
  if (field == "omega_fraction") return r.omega_fraction;
  throw DomainError("rate_fit: unknown x field '" + std::string(field) + "'");
}

double y_value(const ResultRecord& r, std::string_view field) {
  if (field == "mse") return r.mse;
  if (field == "op_norm_sq") return r.op_norm_sq;
  if (field == "objective") return r.objective;
  if (field == "wall_time") return r.wall_time;
  throw DomainError("rate_fit: unknown y field '" + std::string(field) + "'");
}

double graphon_alpha(const std::string& id) { return parse_graphon(id).alpha; }

bool is_block(const std::string& id) { return parse_graphon(id).kind == GraphonKind::Block; }

std::string group_key(const ResultRecord& r) {
  std::ostringstream os;
  os << "method=" << r.method;
  switch (parse_scenario(r.scenario)) {
    case Scenario::BiasDecay:
      os << " n=" << r.n << " graphon=" << r.graphon;
      break;
    case Scenario::GraphonRate:
      os << " graphon=" << r.graphon << " beta=" << r.beta;
      break;
    case Scenario::Completion:
      os << " k=" << r.k << " graphon=" << r.graphon << " beta=" << r.beta
         << " omega_fraction=" << r.omega_fraction;
      break;
    case Scenario::LowerboundAudit:
      break;
    default:
      os << " k=" << r.k << " graphon=" << r.graphon << " beta=" << r.beta;
      break;
  }
  return os.str();
}

}  // namespace

int auto_k(Index n, double alpha) {
  const double a = std::min(alpha, 1.0);
  const double k = std::ceil(std::pow(static_cast<double>(n), 1.0 / (a + 1.0)));
  return static_cast<int>(std::clamp<double>(k, 1.0, static_cast<double>(n)));
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
  std::vector<std::string> graphons = config.graphon;
  if (graphons.empty()) graphons.push_back("-");
  std::vector<GridPoint> grid;
  for (Index n : config.n) {
    for (int k : config.k) {
      for (const auto& g : graphons) {
        for (double beta : config.beta) {
          for (double fraction : config.omega_fraction) grid.push_back({n, k, g, beta, fraction});
        }
      }
    }
  }
  return grid;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto grid = expand_grid(config);
  const auto reps = static_cast<std::size_t>(config.replicates);
  std::vector<ResultRecord> records(grid.size() * reps);

  auto task = [&](std::size_t index) {
    const std::size_t g = index / reps;
    const int r = static_cast<int>(index % reps);
    const GridPoint& point = grid[g];
    ResultRecord& rec = records[index];
    rec.scenario = to_string(config.scenario);
    rec.method = config.scenario == Scenario::LowerboundAudit || config.scenario == Scenario::BiasDecay ||
                         config.scenario == Scenario::Opnorm
                     ? "none"
                 : config.scenario == Scenario::Completion ? "completion"
                                                           : to_string(config.method);
    rec.n = point.n;
    rec.k = point.k;
    rec.graphon = point.graphon;
    rec.beta = point.beta;
    rec.omega_fraction = point.omega_fraction;
    rec.replicate = r;
    rec.seed = replicate_seed(config.base_seed, g, r);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Metrics m = run_replicate(config, point, rec.seed);
      rec.k = m.k;
      rec.mse = m.mse;
      rec.op_norm_sq = m.op_norm_sq;
      rec.objective = m.objective;
    } catch (const NumericalError& e) {
      rec.mse = rec.op_norm_sq = rec.objective = kNaN;
      rec.status = sanitize(std::string("numerical: ") + e.what());
    } catch (const Error& e) {
      rec.mse = rec.op_norm_sq = rec.objective = kNaN;
      rec.status = sanitize(std::string("error: ") + e.what());
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t total = records.size();
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) task(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
  return records;
}

std::vector<ResultRecord> run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.output.empty()) throw FormatError("config: output path is not set");
  std::ofstream out(config.output, std::ios::binary);
  if (!out) throw FormatError("cannot open output '" + config.output + "' for writing");
  auto records = run_experiment(config);
  write_results_csv(out, records);
  if (!out) throw FormatError("failed writing '" + config.output + "'");
  return records;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << sanitize(r.scenario) << ',' << sanitize(r.method) << ',' << r.n << ',' << r.k << ','
        << sanitize(r.graphon) << ',' << format_double(r.beta) << ',' << format_double(r.omega_fraction) << ','
        << r.replicate << ',' << r.seed << ',' << format_double(r.mse) << ',' << format_double(r.op_norm_sq)
        << ',' << format_double(r.objective) << ',' << format_double(r.wall_time) << ','
        << sanitize(r.status) << '\n';
  }
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("results csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw FormatError("results csv: unexpected header");
  std::vector<ResultRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 14) throw FormatError("results csv line " + std::to_string(line_no) + ": expected 14 fields");
    ResultRecord r;
    r.scenario = f[0];
    r.method = f[1];
    r.n = static_cast<Index>(parse_field<long long>(f[2], line_no));
    r.k = parse_field<int>(f[3], line_no);
    r.graphon = f[4];
    r.beta = parse_field<double>(f[5], line_no);
    r.omega_fraction = parse_field<double>(f[6], line_no);
    r.replicate = parse_field<int>(f[7], line_no);
    r.seed = parse_field<std::uint64_t>(f[8], line_no);
    r.mse = parse_field<double>(f[9], line_no);
    r.op_norm_sq = parse_field<double>(f[10], line_no);
    r.objective = parse_field<double>(f[11], line_no);
    r.wall_time = parse_field<double>(f[12], line_no);
    r.status = f[13];
    records.push_back(std::move(r));
  }
  return records;
}

RateFit rate_fit(const std::vector<ResultRecord>& records, std::string_view x_field, std::string_view y_field) {
  std::map<double, std::pair<double, std::size_t>> by_x;
  for (std::size_t row = 0; row < records.size(); ++row) {
    const auto& r = records[row];
    if (!r.ok()) continue;
    const double x = x_value(r, x_field);
    const double y = y_value(r, y_field);
    if (!(y > 0.0)) {
      throw DomainError("rate_fit: nonpositive " + std::string(y_field) + " in row " + std::to_string(row) +
                        " (n=" + std::to_string(r.n) + ", k=" + std::to_string(r.k) +
                        ", replicate=" + std::to_string(r.replicate) + ")");
    }
    if (!(x > 0.0)) throw DomainError("rate_fit: nonpositive " + std::string(x_field) + " in row " + std::to_string(row));
    auto& acc = by_x[x];
    acc.first += y;
    acc.second += 1;
  }
  if (by_x.size() < 2) throw DomainError("rate_fit: need at least two distinct x values");

  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [x, acc] : by_x) {
    lx.push_back(std::log(x));
    ly.push_back(std::log(acc.first / static_cast<double>(acc.second)));
  }
  const auto m = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  RateFit fit;
  fit.points = lx.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (lx.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
      ssr += e * e;
    }
    fit.stderr_slope = std::sqrt(ssr / (m - 2.0) / sxx);
  }
  return fit;
}

std::optional<double> theory_exponent(const ResultRecord& r) {
  const Scenario s = parse_scenario(r.scenario);
  switch (s) {
    case Scenario::SbmRate:
      // Oracle labels leave only the k^2/n^2 term; fitted labels add log k / n.
      return (r.method == "oracle" || r.k == 1) ? -2.0 : -1.0;
    case Scenario::GraphonRate: {
      const double a = std::min(graphon_alpha(r.graphon), 1.0);
      return -2.0 * a / (a + 1.0);
    }
    case Scenario::BiasDecay:
      return -2.0 * std::min(graphon_alpha(r.graphon), 1.0);
    case Scenario::Opnorm:
      return 1.0;
    case Scenario::Completion:
      if (is_block(r.graphon)) return r.k == 1 ? -2.0 : -1.0;
      return std::nullopt;
    case Scenario::LowerboundAudit:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<ReportLine> report_lines(const std::vector<ResultRecord>& records, double band) {
  std::vector<std::pair<std::string, std::vector<ResultRecord>>> groups;
  for (const auto& r : records) {
    const std::string key = r.scenario + "|" + group_key(r);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = std::prev(groups.end());
    }
    it->second.push_back(r);
  }

  std::vector<ReportLine> lines;
  for (const auto& [key, rows] : groups) {
    ReportLine line;
    line.scenario = rows.front().scenario;
    line.group = key.substr(key.find('|') + 1);
    const auto failed = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); }));
    if (failed > 0) line.note = std::to_string(failed) + " failed row(s); ";

    if (parse_scenario(line.scenario) == Scenario::LowerboundAudit) {
      double violations = 0.0;
      for (const auto& r : rows) violations += r.ok() ? r.objective : 0.0;
      line.pass = failed == 0 && violations == 0.0;
      line.note += "violations=" + format_double(violations);
      lines.push_back(std::move(line));
      continue;
    }

    const std::string x_field = parse_scenario(line.scenario) == Scenario::BiasDecay ? "k" : "n";
    const std::string y_field = parse_scenario(line.scenario) == Scenario::Opnorm ? "op_norm_sq" : "mse";
    try {
      line.fit = rate_fit(rows, x_field, y_field);
      line.theory = theory_exponent(rows.front());
      if (line.theory) {
        line.pass = std::abs(line.fit->slope - *line.theory) <= band;
      } else {
        const double a = std::min(graphon_alpha(rows.front().graphon), 1.0);
        line.note += "not asserted; candidates " + format_double(std::max(-2.0 * a / (2.0 * a + 1.0), -1.0)) +
                     " and " + format_double(std::max(-2.0 * a / (a + 1.0), -1.0)) + "; ";
      }
      line.note += "slope of log " + y_field + " vs log " + x_field;
    } catch (const Error& e) {
      line.note += e.what();
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string report(const std::vector<ResultRecord>& records, double band) {
  std::ostringstream os;
  os.precision(4);
  for (const auto& line : report_lines(records, band)) {
    os << line.scenario << "  " << line.group << "\n";
    if (line.fit) {
      os << "  slope " << line.fit->slope << " (stderr " << line.fit->stderr_slope << ", " << line.fit->points
         << " points)";
      if (line.theory) os << "  theory " << *line.theory << "  band " << band;
      os << "\n";
    }
    if (!line.note.empty()) os << "  " << line.note << "\n";
    const bool asserted = line.theory.has_value() || line.scenario == "lowerbound-audit";
    os << "  " << (asserted ? (line.pass ? "PASS" : "FAIL") : "INFO") << "\n";
  }
  return os.str();
}

}  // namespace graphon
