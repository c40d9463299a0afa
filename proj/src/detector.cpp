#include "hcdetect/detector.hpp"

#include <algorithm>
#include <string>

#include "hcdetect/error.hpp"

namespace hcdetect {

void DetectionConfig::validate() const {
  if (k_min < 2 || k_max < k_min) {
    throw Error(Errc::domain_error, "k range must satisfy 2 <= k_min <= k_max, got " +
                                        std::to_string(k_min) + ".." + std::to_string(k_max));
  }
}

std::vector<Segment> localize(std::span<const Trigger> triggers, std::size_t window,
                              std::size_t m) {
  for (const Trigger& t : triggers) {
    if (t.index >= m) {
      throw Error(Errc::index_out_of_range, "trigger index " + std::to_string(t.index) +
                                                " outside series of length " + std::to_string(m));
    }
  }
  std::vector<Trigger> sorted(triggers.begin(), triggers.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Trigger& a, const Trigger& b) { return a.index < b.index; });

  // Strictly greater HC wins, so ties keep the earlier index.
  auto absorb = [](Peak& peak, const Trigger& t) {
    if (t.hc > peak.hc) peak = {t.index, t.hc};
  };

  std::vector<Segment> out;
  for (const Trigger& t : sorted) {
    const std::size_t lo = t.index > window ? t.index - window : 0;
    const std::size_t hi = std::min(m - 1, t.index + window);
    if (!out.empty() && lo <= out.back().end + 1) {
      Segment& seg = out.back();
      seg.end = std::max(seg.end, hi);
      Peak overall{seg.peak_index, seg.peak_hc};
      absorb(overall, t);
      seg.peak_index = overall.index;
      seg.peak_hc = overall.hc;
      continue;
    }
    Segment seg;
    seg.start = lo;
    seg.end = hi;
    seg.peak_index = t.index;
    seg.peak_hc = t.hc;
    out.push_back(seg);
  }

  // Per-event peaks: triggers split wherever consecutive indices are more
  // than `window` apart.
  std::size_t s = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    while (!out[s].contains(sorted[i].index)) ++s;
    Segment& seg = out[s];
    const bool new_event = seg.peaks.empty() || sorted[i].index - sorted[i - 1].index > window;
    if (new_event) {
      seg.peaks.push_back({sorted[i].index, sorted[i].hc});
    } else {
      absorb(seg.peaks.back(), sorted[i]);
    }
  }
  return out;
}

std::vector<Segment> localize(std::span<const std::size_t> trigger_indices, std::size_t window,
                              std::size_t m) {
  std::vector<Trigger> triggers;
  triggers.reserve(trigger_indices.size());
  for (std::size_t i : trigger_indices) triggers.push_back({i, 0.0});
  return localize(triggers, window, m);
}

TimeSeries mask(const TimeSeries& series, std::span<const Segment> segments) {
  const auto values = series.values();
  std::vector<double> out(values.size(), 0.0);
  for (const Segment& seg : segments) {
    const std::size_t end = std::min(seg.end, values.size() - 1);
    for (std::size_t i = seg.start; i <= end; ++i) out[i] = values[i];
  }
  return TimeSeries(std::move(out), series.sample_rate_hz());
}

DetectionReport detect(const TimeSeries& series, const DetectionConfig& config) {
  config.validate();
  const std::size_t m = series.size();
  if (m < static_cast<std::size_t>(config.k_max)) {
    throw Error(Errc::no_clusters, "series of length " + std::to_string(m) +
                                       " is shorter than k_max = " +
                                       std::to_string(config.k_max));
  }

  DetectionReport report;
  report.m = m;
  report.kurtosis = kurtosis(series);

  const HCProfile profile =
      hc_profile(standardize(series), HcOptions{config.restricted_rank_range});
  report.hc_max = profile.hc_max;
  report.hc_argmax_rank = profile.argmax_rank;
  report.asymptotic_threshold = profile.asymptotic_threshold;
  report.hc_ratio = profile.ratio();
  report.reject_normality = profile.hc_max > profile.asymptotic_threshold;

  // Clustering runs on HC values in rank order; records carry the way back
  // to time indices.
  const KSelection sel =
      select_model(profile.hc_values, config.k_min, config.k_max, config.seed, config.kmeans);
  report.clusters.k = sel.k;
  report.clusters.centroids = sel.model.centroids;
  report.clusters.inertia = sel.model.inertia;
  report.clusters.silhouette = sel.model.silhouette.value_or(0.0);
  report.clusters.silhouette_by_k = sel.scores;
  report.clusters.seed = config.seed;

  const ThresholdSet thresholds = thresholds_from(sel.model, profile.hc_values, config.range_factor);
  for (std::size_t j = 0; j < thresholds.thresholds.size(); ++j) {
    ThresholdDetection det;
    det.cluster_threshold = thresholds.thresholds[j];
    det.threshold = config.min_threshold
                        ? std::max(det.cluster_threshold, *config.min_threshold)
                        : det.cluster_threshold;
    det.cluster_id = thresholds.cluster_ids[j];
    det.cluster_range = thresholds.cluster_ranges[j];
    for (std::size_t r = 0; r < profile.size(); ++r) {
      if (profile.hc_values[r] > det.threshold) {
        det.triggers.push_back({profile.records[r].original_index, profile.hc_values[r]});
      }
    }
    std::sort(det.triggers.begin(), det.triggers.end(),
              [](const Trigger& a, const Trigger& b) { return a.index < b.index; });
    det.segments = localize(det.triggers, config.window, m);
    report.per_threshold.push_back(std::move(det));
  }
  return report;
}

}  // namespace hcdetect
