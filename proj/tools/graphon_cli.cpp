// graphon: command-line driver for generation, fitting, completion,
// lower-bound constructions and Monte Carlo sweeps.
//
// Exit codes: 0 success, 2 bad input or configuration, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphon/completion.hpp"
#include "graphon/config.hpp"
#include "graphon/error.hpp"
#include "graphon/estimators.hpp"
#include "graphon/graphon.hpp"
#include "graphon/harness.hpp"
#include "graphon/lower_bounds.hpp"
#include "graphon/matrix_io.hpp"
#include "graphon/model.hpp"
#include "graphon/rng.hpp"

namespace fs = std::filesystem;
using namespace graphon;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct FitFlags {
  int restarts = 8;
  int max_iterations = 100;
  double tolerance = 1e-9;
  std::string init = "spectral";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--restarts", restarts, "Restarts of the alternating fit")->capture_default_str();
    cmd.add_option("--max-iterations", max_iterations, "Sweeps per restart")->capture_default_str();
    cmd.add_option("--tolerance", tolerance, "Stop when a sweep lowers the objective by less")
        ->capture_default_str();
    cmd.add_option("--init", init, "spectral or random")
        ->check(CLI::IsMember({"spectral", "random"}))
        ->capture_default_str();
  }

  FitOptions options() const {
    FitOptions opts;
    opts.restarts = restarts;
    opts.max_iterations = max_iterations;
    opts.tolerance = tolerance;
    opts.init = init == "random" ? InitMethod::Random : InitMethod::Spectral;
    return opts;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << text;
}

std::vector<double> load_design(const fs::path& path) {
  const Matrix m = io::load_matrix(path);
  if (m.cols() != 1 && m.rows() != 1) throw FormatError("design file must hold a single row or column");
  return {m.data(), m.data() + m.size()};
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string graphon;
  Index n = 0;
  std::string design = "iid-uniform";
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::string theta_out;
  std::string adjacency_out;
  std::string design_out;
};

int run_generate(const GenerateArgs& args) {
  const GraphonSpec spec = parse_graphon(args.graphon);
  const LatentDesign design =
      sample_design(DesignSpec::parse(args.design), static_cast<std::size_t>(args.n), derive_seed(args.seed, 0));
  const ProbMatrix theta = scale_to_sparsity(theta_from_graphon(spec, design), args.beta);
  const Adjacency a = sample_adjacency(theta, derive_seed(args.seed, 1));
  if (!args.theta_out.empty()) io::save_matrix(args.theta_out, theta.matrix());
  if (!args.adjacency_out.empty()) io::save_adjacency(args.adjacency_out, a);
  if (!args.design_out.empty()) {
    Matrix xi(args.n, 1);
    for (Index i = 0; i < args.n; ++i) xi(i, 0) = design[static_cast<std::size_t>(i)];
    io::save_matrix(args.design_out, xi);
  }
  std::cout << "graphon " << spec.id() << "  n " << args.n << "  edges " << a.edge_count() << "\n";
  return 0;
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
  std::string adjacency;
  std::optional<Index> n;
  int k = 2;
  std::string method = "alternating";
  std::string design;
  std::string oracle_rule = "interval";
  std::uint64_t seed = 0;
  std::string output;
  std::string theta_out;
  FitFlags flags;
};

int run_fit(const FitArgs& args) {
  const Adjacency a = io::load_adjacency(args.adjacency, args.n);
  FitResult fit;
  if (args.method == "exact") {
    fit = fit_exact(a, args.k);
  } else if (args.method == "oracle") {
    if (args.design.empty()) throw FormatError("fit --method oracle needs --design");
    const LatentDesign design(load_design(args.design));
    if (static_cast<Index>(design.size()) != a.size()) throw FormatError("design length differs from n");
    const auto rule = args.oracle_rule == "quantile" ? OracleRule::SortedQuantile : OracleRule::Interval;
    fit = fit_given_assignment(a, oracle_assignment(design, args.k, rule));
  } else {
    fit = fit_alternating(a, args.k, args.flags.options(), args.seed);
  }
  const std::string json = fit_result_to_json(fit);
  if (args.output.empty()) {
    std::cout << json;
  } else {
    write_text(args.output, json);
  }
  if (!args.theta_out.empty()) io::save_matrix(args.theta_out, fit.theta_hat.matrix());
  if (fit.init_fallback) std::cerr << "warning: spectral initialization fell back to random labels\n";
  return 0;
}

// ---- complete ---------------------------------------------------------------

struct CompleteArgs {
  std::string observed;
  std::string adjacency;
  double omega_fraction = 0.0;
  Index n = 0;
  int k = 2;
  double min_fraction = 0.05;
  std::uint64_t seed = 0;
  std::string output;
  std::string theta_out;
  std::string observations_out;
  std::string masked_out;
  std::string predict;
  FitFlags flags;
};

std::vector<std::pair<Index, Index>> load_pairs(const fs::path& path, Index n) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::vector<std::pair<Index, Index>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long i = 0;
    long long j = 0;
    if (!(fields >> i)) continue;
    if (!(fields >> j) || i < 1 || j < 1 || i > n || j > n) {
      throw FormatError("pairs line " + std::to_string(line_no) + ": expected two 1-based indices");
    }
    pairs.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1));
  }
  return pairs;
}

int run_complete(const CompleteArgs& args) {
  ObservedGraph obs;
  Index n = args.n;
  if (!args.observed.empty()) {
    if (n < 2) throw FormatError("complete --observed needs --n");
    std::ifstream in(args.observed);
    if (!in) throw FormatError("cannot open '" + args.observed + "'");
    obs = io::read_masked_edges(in, n);
  } else {
    if (args.adjacency.empty() || !(args.omega_fraction > 0.0)) {
      throw FormatError("complete needs --observed FILE --n N, or --adjacency FILE --omega-fraction F");
    }
    const Adjacency a = io::load_adjacency(args.adjacency, n >= 2 ? std::optional<Index>(n) : std::nullopt);
    n = a.size();
    const double pairs = args.omega_fraction * static_cast<double>(n) * static_cast<double>(n);
    obs = observe(a, sample_omega(n, static_cast<std::size_t>(std::llround(pairs)), derive_seed(args.seed, 3)));
  }
  if (!args.observations_out.empty()) {
    std::ofstream out(args.observations_out);
    if (!out) throw FormatError("cannot open '" + args.observations_out + "' for writing");
    io::write_observations(out, obs.omega);
  }
  if (!args.masked_out.empty()) {
    std::ofstream out(args.masked_out);
    if (!out) throw FormatError("cannot open '" + args.masked_out + "' for writing");
    io::write_masked_edges(out, obs);
  }

  const FitResult fit = fit_completion(obs, args.k, {args.flags.options(), args.min_fraction}, args.seed);
  const std::string json = fit_result_to_json(fit);
  if (args.output.empty()) {
    std::cout << json;
  } else {
    write_text(args.output, json);
  }
  if (!args.theta_out.empty()) io::save_matrix(args.theta_out, fit.theta_hat.matrix());
  if (!args.predict.empty()) {
    const auto pairs = load_pairs(args.predict, n);
    const auto values = predict(fit.theta_hat, pairs);
    std::cout.precision(17);
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      std::cout << pairs[t].first + 1 << ' ' << pairs[t].second + 1 << ' ' << values[t] << '\n';
    }
  }
  return 0;
}

// ---- lowerbound -------------------------------------------------------------

struct LowerboundArgs {
  std::string family = "t1";
  Index n = 64;
  int k = 8;
  double c = kDefaultC1;
  std::uint64_t seed = 0;
  std::size_t count = 16;
  std::string out_dir;
};

int run_lowerbound(const LowerboundArgs& args) {
  std::vector<HardInstance> family;
  double log_packing = 0.0;
  if (args.family == "t1") {
    family = t1_family(args.n, args.k, args.c, args.seed, args.count);
    log_packing = std::log(static_cast<double>(vg_packing(args.k * (args.k - 1) / 2, args.seed).size()));
  } else if (args.family == "t2") {
    family = t2_family(args.n, args.k, args.c, args.seed, args.count);
  } else {
    const int d = static_cast<int>(args.n);
    const PackingSet packing = vg_packing(d, args.seed);
    log_packing = std::log(static_cast<double>(packing.size()));
    const auto total = static_cast<std::size_t>(std::min<std::uint64_t>(packing.size(), args.count));
    for (std::size_t t = 0; t < total; ++t) {
      const Codeword w = packing.codeword(t);
      std::vector<bool> in_s(w.begin(), w.end());
      family.push_back(finite_k_instance(args.n, args.c, in_s));
      family.back().codeword_indices = {t};
    }
  }

  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    for (std::size_t t = 0; t < family.size(); ++t) {
      const fs::path base = fs::path(args.out_dir) / ("instance_" + std::to_string(t));
      io::save_matrix(base.string() + ".csv", family[t].theta.matrix());
      write_text(base.string() + ".json", hard_instance_metadata_json(family[t]));
    }
  }

  double kl_max = 0.0;
  double chi2_max = 0.0;
  double quad_max = 0.0;
  std::size_t bound_violations = 0;
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = 0; b < family.size(); ++b) {
      if (a == b) continue;
      const double kl = kl_product_bernoulli(family[a].theta, family[b].theta);
      const double chi2 = chi2_product_bernoulli(family[a].theta, family[b].theta);
      const double quad = (family[a].theta.matrix() - family[b].theta.matrix()).squaredNorm();
      if (kl > 8.0 * quad || chi2 > std::exp(8.0 * quad)) ++bound_violations;
      kl_max = std::max(kl_max, kl);
      chi2_max = std::max(chi2_max, chi2);
      quad_max = std::max(quad_max, quad);
    }
  }

  std::cout.precision(6);
  std::cout << "family " << args.family << "  n " << args.n << "  k " << family.front().k << "  members "
            << family.size() << "\n";
  if (args.family == "t1") {
    const T1Audit audit = audit_t1(family);
    std::cout << "T1 distance audit: " << audit.pairs << " pairs, " << audit.violations
              << " violations, min ratio " << audit.min_ratio << "\n";
  } else if (args.family == "t2") {
    const T2Audit audit = audit_t2(family);
    std::cout << "T2 separation audit: " << audit.pairs << " column pairs, " << audit.violations
              << " violations, min ratio " << audit.min_ratio << "\n";
  }
  std::cout << "max KL " << kl_max << "  max chi2 " << chi2_max << "  max sum sq diff " << quad_max
            << "  divergence-bound violations " << bound_violations << "\n";
  if (log_packing > 0.0) {
    std::cout << "fano bound (members' KL diameter, full packing) " << fano_bound(kl_max, log_packing) << "\n";
    std::cout << "chi2 fano bound " << chi2_fano_bound(chi2_max, std::exp(log_packing)) << "\n";
  }
  return 0;
}

// ---- sweep / report ---------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> workers;
  std::string output;
  bool print_report = false;
};

int run_sweep_command(const SweepArgs& args) {
  ExperimentConfig config = load_config(args.config);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw FormatError("--set expects key=value, got '" + kv + "'");
    apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed) config.base_seed = *args.seed;
  if (args.replicates) config.replicates = *args.replicates;
  if (args.workers) config.workers = *args.workers;
  if (!args.output.empty()) config.output = args.output;

  const auto records = run_sweep(config);
  const auto failed = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok(); });
  const auto numerical = std::count_if(records.begin(), records.end(),
                                       [](const auto& r) { return r.status.rfind("numerical", 0) == 0; });
  std::cout << records.size() << " rows written to " << config.output << " (" << failed << " failed)\n";
  if (args.print_report) std::cout << report(records, config.band);
  return numerical > 0 ? kExitNumerical : 0;
}

struct ReportArgs {
  std::string input;
  double band = 0.3;
};

int run_report(const ReportArgs& args) {
  std::ifstream in(args.input);
  if (!in) throw FormatError("cannot open '" + args.input + "'");
  std::cout << report(read_results_csv(in), args.band);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-model and graphon estimation toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample theta and an adjacency matrix from a graphon");
  generate->add_option("--graphon", gen.graphon, "Graphon id, e.g. smooth, holder:0.5, sbm:2:0.6:0.2")->required();
  generate->add_option("--n", gen.n, "Number of nodes")->required()->check(CLI::PositiveNumber);
  generate->add_option("--design", gen.design, "iid-uniform or fixed-grid")->capture_default_str();
  generate->add_option("--beta", gen.beta, "Sparsity: scale theta so its maximum is at most beta")
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate->add_option("--theta", gen.theta_out, "Write theta (.csv or .grl)");
  generate->add_option("--adjacency", gen.adjacency_out, "Write A (.csv, .grl or .edges)");
  generate->add_option("--design-out", gen.design_out, "Write the latent positions");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Least-squares block fit of a fully observed graph");
  fit_cmd->add_option("--adjacency", fit.adjacency, "Adjacency file")->required();
  fit_cmd->add_option("--n", fit.n, "Node count (edge lists with isolated trailing nodes)");
  fit_cmd->add_option("--k", fit.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--method", fit.method, "alternating, exact or oracle")
      ->check(CLI::IsMember({"alternating", "exact", "oracle"}))
      ->capture_default_str();
  fit_cmd->add_option("--design", fit.design, "Latent positions for --method oracle");
  fit_cmd->add_option("--oracle-rule", fit.oracle_rule, "interval or quantile")
      ->check(CLI::IsMember({"interval", "quantile"}))
      ->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
  fit_cmd->add_option("--output", fit.output, "Write the fit as JSON (default stdout)");
  fit_cmd->add_option("--theta", fit.theta_out, "Write theta_hat");
  fit.flags.add_to(*fit_cmd);

  CompleteArgs comp;
  auto* complete = app.add_subcommand("complete", "Link prediction from a partially observed graph");
  complete->add_option("--observed", comp.observed, "Masked edge list: 'i j value' per observation");
  complete->add_option("--adjacency", comp.adjacency, "Full adjacency to subsample instead");
  complete->add_option("--omega-fraction", comp.omega_fraction, "|Omega| / n^2 when subsampling");
  complete->add_option("--n", comp.n, "Node count");
  complete->add_option("--k", comp.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  complete->add_option("--min-fraction", comp.min_fraction, "Refuse when |Omega| / n^2 is below this")
      ->capture_default_str();
  complete->add_option("--seed", comp.seed, "Random seed")->capture_default_str();
  complete->add_option("--output", comp.output, "Write the fit as JSON (default stdout)");
  complete->add_option("--theta", comp.theta_out, "Write theta_hat");
  complete->add_option("--observations-out", comp.observations_out, "Write Omega as 'i j multiplicity'");
  complete->add_option("--masked-out", comp.masked_out, "Write the observed entries as a masked edge list");
  complete->add_option("--predict", comp.predict, "File of 'i j' pairs to score");
  comp.flags.add_to(*complete);

  LowerboundArgs lb;
  auto* lower = app.add_subcommand("lowerbound", "Emit hard instances and audit their divergences");
  lower->add_option("--family", lb.family, "t1, t2 or finite-k")
      ->check(CLI::IsMember({"t1", "t2", "finite-k"}))
      ->capture_default_str();
  lower->add_option("--n", lb.n, "Number of nodes")->capture_default_str();
  lower->add_option("--k", lb.k, "Number of blocks (t1, t2)")->capture_default_str();
  lower->add_option("--c", lb.c, "Construction constant c1, c2 or c")->capture_default_str();
  lower->add_option("--seed", lb.seed, "Packing seed")->capture_default_str();
  lower->add_option("--count", lb.count, "Members to emit")->capture_default_str();
  lower->add_option("--out-dir", lb.out_dir, "Directory for instance_<i>.csv and .json sidecars");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo experiment from a config file");
  sweep->add_option("config", sw.config, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--set", sw.overrides, "Override a config key: key=value");
  sweep->add_option("--seed", sw.seed, "Override base_seed");
  sweep->add_option("--replicates", sw.replicates, "Override replicates");
  sweep->add_option("--workers", sw.workers, "Override workers");
  sweep->add_option("--output", sw.output, "Override output");
  sweep->add_flag("--report", sw.print_report, "Print the report after the run");

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Summarize a results CSV against theory slopes");
  report_cmd->add_option("input", rep.input, "Results CSV")->required();
  report_cmd->add_option("--band", rep.band, "Allowed |slope - theory|")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*fit_cmd) return run_fit(fit);
    if (*complete) return run_complete(comp);
    if (*lower) return run_lowerbound(lb);
    if (*sweep) return run_sweep_command(sw);
    if (*report_cmd) return run_report(rep);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (best estimate " << e.best_estimate() << ")\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
