#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcdetect/commands.hpp"
#include "hcdetect/error.hpp"
#include "hcdetect/version.hpp"

namespace {

using namespace hcdetect;

struct InputFlags {
  std::string path;
  std::string format = "csv_single_column";
  std::optional<std::size_t> channel;
  std::optional<double> sample_rate;

  void add_to(CLI::App& app) {
    app.add_option("--input", path, "input series file")->required();
    app.add_option("--format", format, "csv_single_column | csv_time_value | raw_f64_le")
        ->capture_default_str();
    app.add_option("--channel", channel, "0-based CSV column");
    app.add_option("--sample-rate", sample_rate, "sampling rate in Hz, recorded as metadata");
  }

  InputSpec resolve() const {
    const auto f = parse_input_format(format);
    if (!f) throw Error(Errc::domain_error, "unknown input format '" + format + "'");
    return {path, *f, channel, sample_rate};
  }
};

struct SimFlags {
  std::vector<double> mu;
  std::vector<double> eps;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  std::string m_grid;
  std::string aggregator = "mean";
  std::string mode = "fresh";
  std::size_t hysteresis = 2;
  bool standardize = false;
  bool restricted = false;
  unsigned threads = 1;
  std::string out;
  std::string trace;

  void add_to(CLI::App& app, bool sparse) {
    app.add_option("--mu", mu, "signal strengths, comma separated")->required()->delimiter(',');
    if (sparse) {
      app.add_option("--eps", eps, "sparsity levels in (0, 1), comma separated")
          ->required()
          ->delimiter(',');
    }
    app.add_option("--replicates", replicates, "replicates per grid point")->capture_default_str();
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_option("--m-grid", m_grid, "comma list of sizes, or LO:HI:N geometric (default 100:1000000:16)");
    app.add_option("--aggregator", aggregator, "mean | median")
        ->check(CLI::IsMember({"mean", "median"}))
        ->capture_default_str();
    app.add_option("--replicate-mode", mode, "fresh | resample")
        ->check(CLI::IsMember({"fresh", "resample"}))
        ->capture_default_str();
    app.add_option("--hysteresis", hysteresis, "extra grid points that must stay above threshold")
        ->capture_default_str();
    app.add_flag("--standardize", standardize, "re-standardize each replicate before scoring");
    app.add_flag("--restricted-range", restricted, "maximize HC over ranks i <= m/2 only");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
    app.add_option("--out", out, "boundary CSV (default stdout)");
    app.add_option("--trace", trace, "JSON trace (default: --out with .json extension)");
  }

  SimulateCommand resolve(BoundaryKind kind) const {
    SimulateCommand cmd;
    cmd.kind = kind;
    cmd.mu_grid = mu;
    cmd.eps_grid = eps;
    auto& c = cmd.config;
    c.replicates = replicates;
    c.seed = seed;
    if (!m_grid.empty()) c.m_grid = parse_m_grid(m_grid);
    c.aggregator = aggregator == "median" ? Aggregator::median : Aggregator::mean;
    c.mode = mode == "resample" ? ReplicateMode::resample : ReplicateMode::fresh;
    c.hysteresis = hysteresis;
    c.standardize = standardize;
    c.restricted_rank_range = restricted;
    c.threads = threads;
    if (!out.empty()) cmd.out = out;
    if (!trace.empty()) cmd.trace = trace;
    return cmd;
  }
};

// Flag-level validation errors (bad format names, malformed grids) surface
// before the command runs; map them to the validation exit code as well.
template <typename F>
int run(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-criticism detection of sparse signals in time series"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  auto* detect = app.add_subcommand("detect", "detect and localize signal segments");
  InputFlags detect_in;
  detect_in.add_to(*detect);
  DetectionConfig dc;
  std::optional<double> min_threshold;
  std::string detect_out, masked_csv;
  detect->add_option("--window", dc.window, "samples kept on each side of a trigger")
      ->capture_default_str();
  detect->add_option("--k-min", dc.k_min, "smallest cluster count tried")->capture_default_str();
  detect->add_option("--k-max", dc.k_max, "largest cluster count tried")->capture_default_str();
  detect->add_option("--eq1-factor", dc.range_factor, "cluster range factor for thresholds")
      ->capture_default_str();
  detect->add_option("--seed", dc.seed, "k-means seed")->capture_default_str();
  detect->add_option("--min-threshold", min_threshold, "floor applied to every threshold");
  detect->add_flag("--restricted-range", dc.restricted_rank_range,
                   "maximize HC over ranks i <= m/2 only");
  detect->add_option("--out", detect_out, "JSON report (default stdout)");
  detect->add_option("--masked-csv", masked_csv, "per-threshold masked series CSV");

  auto* sim_mean = app.add_subcommand("simulate-mean", "detection boundary for a mean shift");
  SimFlags mean_flags;
  mean_flags.add_to(*sim_mean, false);

  auto* sim_sparse = app.add_subcommand("simulate-sparse", "detection boundary for sparse signals");
  SimFlags sparse_flags;
  sparse_flags.add_to(*sim_sparse, true);

  auto* stats = app.add_subcommand("stats", "summary statistics and HC of a series");
  InputFlags stats_in;
  stats_in.add_to(*stats);
  bool stats_restricted = false;
  stats->add_flag("--restricted-range", stats_restricted, "maximize HC over ranks i <= m/2 only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (detect->parsed()) {
    return run([&] {
      DetectCommand cmd{detect_in.resolve(), dc, std::nullopt, std::nullopt};
      cmd.config.min_threshold = min_threshold;
      if (!detect_out.empty()) cmd.out = detect_out;
      if (!masked_csv.empty()) cmd.masked_csv = masked_csv;
      return cmd_detect(cmd, std::cout, std::cerr);
    });
  }
  if (sim_mean->parsed()) {
    return run([&] {
      return cmd_simulate(mean_flags.resolve(BoundaryKind::mean_shift), std::cout, std::cerr);
    });
  }
  if (sim_sparse->parsed()) {
    return run([&] {
      return cmd_simulate(sparse_flags.resolve(BoundaryKind::sparse), std::cout, std::cerr);
    });
  }
  return run([&] {
    return cmd_stats({stats_in.resolve(), HcOptions{stats_restricted}}, std::cout, std::cerr);
  });
}
