#pragma once

// Monte Carlo detection boundaries: the smallest sample size m at which the
// replicate-aggregated HC crosses sqrt(2 ln ln m).
//
// Replicate r at sample size m always draws from the stream
// derive_seed({seed, m, r}), whatever the generator parameters or thread
// count. Sweeps over mu or eps therefore share their noise draws, and the
// results do not depend on scheduling.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcdetect/hc.hpp"

namespace hcdetect {

enum class GeneratorKind {
  null_model,      // N(0, 1)
  shifted_mean,    // N(mu, 1)
  sparse_mixture,  // N(mu, 1) with probability eps, else N(0, 1)
  sparse_sum,      // N(mu, (1 - eps)^2 + eps^2)
};

std::string to_string(GeneratorKind kind);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::null_model;
  double eps = 0.0;
  double mu = 0.0;

  static GeneratorSpec null_model() { return {}; }
  static GeneratorSpec shifted_mean(double mu) { return {GeneratorKind::shifted_mean, 0.0, mu}; }
  static GeneratorSpec sparse_mixture(double eps, double mu) {
    return {GeneratorKind::sparse_mixture, eps, mu};
  }
  static GeneratorSpec sparse_sum(double eps, double mu) {
    return {GeneratorKind::sparse_sum, eps, mu};
  }

  /// Throws Error(domain_error) for eps outside (0, 1) on the sparse kinds or
  /// a non-finite mu.
  void validate() const;
};

enum class Aggregator { mean, median };

enum class ReplicateMode {
  fresh,     // a new dataset per replicate
  resample,  // one dataset, replicates resample it with replacement
};

/// Geometric grid of `points` integers from `lo` to `hi`, deduplicated.
std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t points);

struct SimConfig {
  std::size_t replicates = 100;
  std::vector<std::size_t> m_grid = geometric_grid(100, 1'000'000, 16);
  std::uint64_t seed = 0;
  Aggregator aggregator = Aggregator::mean;
  ReplicateMode mode = ReplicateMode::fresh;
  std::size_t hysteresis = 2;
  /// Score samples against N(0, 1) as drawn (false) or after re-standardizing
  /// each replicate (true).
  bool standardize = false;
  bool restricted_rank_range = false;
  unsigned threads = 1;

  /// Throws Error(domain_error) for replicates == 0, an empty or
  /// non-ascending grid, or grid entries below 3.
  void validate() const;
};

/// Deterministic for fixed (spec, m, seed). Throws Error(domain_error) on an
/// invalid generator, Error(too_short) for m < 3.
TimeSeries sample(const GeneratorSpec& spec, std::size_t m, std::uint64_t seed);

/// HC_m of one dataset under the configured scoring.
double dataset_hc(std::span<const double> values, const SimConfig& config);

struct McResult {
  double aggregated = 0.0;
  std::vector<double> replicate_hc;  // positional, replicate 0 first
};

McResult mc_hc(const GeneratorSpec& spec, std::size_t m, const SimConfig& config);

double aggregate(std::span<const double> values, Aggregator aggregator);

struct TracePoint {
  std::size_t m = 0;
  double aggregated_hc = 0.0;
  double threshold = 0.0;
  std::vector<double> replicate_hc;
};

struct Crossing {
  std::optional<std::size_t> m_star;  // empty when not found
  std::vector<TracePoint> trace;
};

/// The crossing rule alone: the first grid index whose aggregated HC is at or
/// above threshold there and at the next `hysteresis` points (clipped at the
/// end of the grid).
std::optional<std::size_t> crossing_index(std::span<const TracePoint> trace,
                                          std::size_t hysteresis);

Crossing find_crossing(const GeneratorSpec& spec, const SimConfig& config);

enum class BoundaryKind {
  mean_shift,  // sweeps mu with shifted_mean
  sparse,      // sweeps (eps, mu) with sparse_mixture and sparse_sum
};

struct BoundaryPoint {
  GeneratorSpec spec;
  Crossing crossing;
};

struct BoundaryCurve {
  BoundaryKind kind = BoundaryKind::mean_shift;
  std::vector<BoundaryPoint> points;
};

/// mean_shift: one point per mu (eps_grid ignored). sparse: for each variant
/// (mixture, then sum), for each eps, for each mu. Throws
/// Error(domain_error) on an empty grid or invalid parameters.
BoundaryCurve boundary_grid(BoundaryKind kind, std::span<const double> eps_grid,
                            std::span<const double> mu_grid, const SimConfig& config);

}  // namespace hcdetect
