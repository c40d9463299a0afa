#pragma once

// One-dimensional k-means over HC values, silhouette-guided choice of k and
// per-cluster detection thresholds mean + factor * (max - min).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hcdetect {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
};

struct ClusterModel {
  int k = 0;
  std::vector<double> centroids;  // ascending
  std::vector<int> assignment;    // per input point, in [0, k)
  double inertia = 0.0;           // sum of squared distances to assigned centroid
  std::optional<double> silhouette;  // empty when k == 1 or not yet scored
  std::uint64_t seed = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs plus one
/// run started from the exact contiguous-partition optimum. Restart r draws
/// from a stream derived from (seed, k, r), so the result is a pure function
/// of (points, k, seed, options).
///
/// Throws Error(too_few_points) when points.size() < k or there are fewer
/// than k distinct values, Error(non_finite) for NaN/inf points and
/// Error(domain_error) for k < 1.
ClusterModel kmeans_1d(std::span<const double> points, int k, std::uint64_t seed,
                       const KMeansOptions& options = {});

/// Mean silhouette (b - a) / max(a, b). Points in singleton clusters score 0.
/// Exact, O(m k log m) via per-cluster prefix sums. Throws Error(undefined)
/// for k < 2 and Error(domain_error) if a cluster is empty or the assignment
/// does not cover the points.
double silhouette(std::span<const double> points, const ClusterModel& model);

struct KSelection {
  int k = 0;
  ClusterModel model;  // silhouette filled in
  std::vector<std::pair<int, double>> scores;  // (k, silhouette) per candidate
};

/// Fits every k in [k_min, k_max] and keeps the best silhouette; ties go to
/// the smaller k. Throws Error(domain_error) on a bad range.
KSelection select_model(std::span<const double> points, int k_min, int k_max,
                        std::uint64_t seed, const KMeansOptions& options = {});

int select_k(std::span<const double> points, int k_min, int k_max, std::uint64_t seed,
             const KMeansOptions& options = {});

struct ClusterRange {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

inline constexpr double kDefaultRangeFactor = 0.25;

struct ThresholdSet {
  std::vector<double> thresholds;            // ascending
  std::vector<int> cluster_ids;              // cluster behind thresholds[j]
  std::vector<ClusterRange> cluster_ranges;  // aligned with thresholds
};

/// One threshold per cluster: mean + factor * (max - min).
ThresholdSet thresholds_from(const ClusterModel& model, std::span<const double> points,
                             double factor = kDefaultRangeFactor);

}  // namespace hcdetect
