#pragma once

// End-to-end detection: series -> HC profile -> clusters -> per-cluster
// thresholds -> localized, merged segments for every threshold.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hcdetect/cluster.hpp"
#include "hcdetect/hc.hpp"

namespace hcdetect {

struct DetectionConfig {
  std::size_t window = 50;  // samples kept on each side of a trigger
  int k_min = 2;
  int k_max = 10;
  double range_factor = kDefaultRangeFactor;
  bool restricted_rank_range = false;
  std::uint64_t seed = 0;
  /// Every cluster threshold is raised to at least this value.
  std::optional<double> min_threshold;
  KMeansOptions kmeans;

  /// Throws Error(domain_error) when k_min/k_max are inconsistent.
  void validate() const;
};

/// A sample whose rank-wise HC exceeded the threshold.
struct Trigger {
  std::size_t index = 0;  // time index
  double hc = 0.0;
};

struct Peak {
  std::size_t index = 0;
  double hc = 0.0;
};

struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::size_t peak_index = 0;
  double peak_hc = 0.0;
  /// One peak per group of triggers lying more than `window` apart; a
  /// segment formed by merging nearby events keeps each event's peak.
  std::vector<Peak> peaks;

  bool contains(std::size_t i) const noexcept { return start <= i && i <= end; }
};

/// Expands every trigger to [i - window, i + window] clipped to [0, m - 1]
/// and merges overlapping or touching intervals. Output sorted by start.
/// Throws Error(index_out_of_range) for an index >= m.
std::vector<Segment> localize(std::span<const Trigger> triggers, std::size_t window, std::size_t m);

/// Index-only form; every trigger gets HC 0, so peaks are the earliest index.
std::vector<Segment> localize(std::span<const std::size_t> trigger_indices, std::size_t window,
                              std::size_t m);

/// Copies samples inside any segment and zeroes the rest.
TimeSeries mask(const TimeSeries& series, std::span<const Segment> segments);

struct ThresholdDetection {
  double threshold = 0.0;      // applied value (after min_threshold)
  double cluster_threshold = 0.0;  // value from the cluster formula
  int cluster_id = 0;
  ClusterRange cluster_range;
  std::vector<Trigger> triggers;  // ascending time index
  std::vector<Segment> segments;
};

struct ClusterSummary {
  int k = 0;
  std::vector<double> centroids;
  double inertia = 0.0;
  double silhouette = 0.0;
  std::vector<std::pair<int, double>> silhouette_by_k;
  std::uint64_t seed = 0;
};

struct DetectionReport {
  std::size_t m = 0;
  double hc_max = 0.0;
  std::size_t hc_argmax_rank = 0;
  double asymptotic_threshold = 0.0;
  double hc_ratio = 0.0;  // hc_max / asymptotic_threshold
  KurtosisReport kurtosis;
  bool reject_normality = false;  // hc_max > asymptotic_threshold
  ClusterSummary clusters;
  std::vector<ThresholdDetection> per_threshold;  // ascending threshold
};

/// Throws Error(no_clusters) when m < k_max and propagates core errors.
DetectionReport detect(const TimeSeries& series, const DetectionConfig& config = {});

}  // namespace hcdetect
