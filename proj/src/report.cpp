#include "hcdetect/report.hpp"

#include <chrono>
#include <ctime>
#include <ostream>

#include "hcdetect/io.hpp"
#include "hcdetect/version.hpp"

namespace hcdetect {
namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view to_string(Aggregator a) { return a == Aggregator::mean ? "mean" : "median"; }

std::string_view to_string(ReplicateMode mode) {
  return mode == ReplicateMode::fresh ? "fresh" : "resample";
}

json segment_to_json(const Segment& s) {
  json peaks = json::array();
  for (const Peak& p : s.peaks) peaks.push_back({{"index", p.index}, {"hc", p.hc}});
  return {{"start", s.start},
          {"end", s.end},
          {"peak_index", s.peak_index},
          {"peak_hc", s.peak_hc},
          {"peaks", std::move(peaks)}};
}

}  // namespace

RunManifest make_manifest(std::string command, json config, std::uint64_t seed,
                          std::string input_digest) {
  return {std::move(command), std::move(config), seed, std::move(input_digest), utc_now()};
}

json to_json(const RunManifest& manifest) {
  json j = {{"tool", kToolName},
            {"tool_version", kToolVersion},
            {"schema_version", kSchemaVersion},
            {"command", manifest.command},
            {"config", manifest.config},
            {"seed", manifest.seed},
            {"created_utc", manifest.created_utc}};
  j["input_digest"] = manifest.input_digest.empty() ? json(nullptr) : json(manifest.input_digest);
  return j;
}

json config_to_json(const DetectionConfig& config) {
  json j = {{"window", config.window},
            {"k_min", config.k_min},
            {"k_max", config.k_max},
            {"range_factor", config.range_factor},
            {"restricted_rank_range", config.restricted_rank_range},
            {"seed", config.seed},
            {"kmeans_restarts", config.kmeans.restarts},
            {"kmeans_max_iterations", config.kmeans.max_iterations}};
  j["min_threshold"] = config.min_threshold ? json(*config.min_threshold) : json(nullptr);
  return j;
}

json config_to_json(const SimConfig& config) {
  return {{"replicates", config.replicates},
          {"m_grid", config.m_grid},
          {"seed", config.seed},
          {"aggregator", to_string(config.aggregator)},
          {"replicate_mode", to_string(config.mode)},
          {"hysteresis", config.hysteresis},
          {"standardize", config.standardize},
          {"restricted_rank_range", config.restricted_rank_range},
          {"threads", config.threads}};
}

json report_to_json(const DetectionReport& report, const TimeSeries& series,
                    const RunManifest& manifest) {
  const Moments mo = population_moments(series.values());
  json stats = {{"m", report.m},
                {"mean", mo.mean},
                {"sd", mo.sd},
                {"kurtosis_raw", report.kurtosis.raw},
                {"kurtosis_excess", report.kurtosis.excess}};
  stats["sample_rate_hz"] =
      series.sample_rate_hz() ? json(*series.sample_rate_hz()) : json(nullptr);

  json hc = {{"hc_max", report.hc_max},
             {"argmax_rank", report.hc_argmax_rank},
             {"asymptotic_threshold", report.asymptotic_threshold},
             {"ratio", report.hc_ratio},
             {"reject_normality", report.reject_normality}};

  json by_k = json::array();
  for (const auto& [k, s] : report.clusters.silhouette_by_k) by_k.push_back({{"k", k}, {"score", s}});
  json clusters = {{"k", report.clusters.k},
                   {"centroids", report.clusters.centroids},
                   {"inertia", report.clusters.inertia},
                   {"silhouette", report.clusters.silhouette},
                   {"silhouette_by_k", std::move(by_k)},
                   {"seed", report.clusters.seed}};

  json thresholds = json::array();
  for (const ThresholdDetection& d : report.per_threshold) {
    json segments = json::array();
    for (const Segment& s : d.segments) segments.push_back(segment_to_json(s));
    thresholds.push_back({{"value", d.threshold},
                          {"cluster_threshold", d.cluster_threshold},
                          {"cluster_id", d.cluster_id},
                          {"cluster",
                           {{"min", d.cluster_range.min},
                            {"max", d.cluster_range.max},
                            {"mean", d.cluster_range.mean},
                            {"count", d.cluster_range.count}}},
                          {"trigger_count", d.triggers.size()},
                          {"segments", std::move(segments)}});
  }

  return {{"schema_version", kSchemaVersion},
          {"manifest", to_json(manifest)},
          {"stats", std::move(stats)},
          {"hc", std::move(hc)},
          {"clusters", std::move(clusters)},
          {"thresholds", std::move(thresholds)}};
}

SeriesSummary summarize(const TimeSeries& series, const HcOptions& options) {
  SeriesSummary s;
  s.m = series.size();
  const Moments mo = population_moments(series.values());
  s.mean = mo.mean;
  s.sd = mo.sd;
  s.kurtosis = kurtosis(series);
  const HCProfile prof = hc_profile(series, options);
  s.hc_max = prof.hc_max;
  s.asymptotic_threshold = prof.asymptotic_threshold;
  s.ratio = prof.ratio();
  return s;
}

json summary_to_json(const SeriesSummary& s, const RunManifest& manifest) {
  return {{"schema_version", kSchemaVersion},
          {"manifest", to_json(manifest)},
          {"stats",
           {{"m", s.m},
            {"mean", s.mean},
            {"sd", s.sd},
            {"kurtosis_raw", s.kurtosis.raw},
            {"kurtosis_excess", s.kurtosis.excess},
            {"hc_max", s.hc_max},
            {"asymptotic_threshold", s.asymptotic_threshold},
            {"ratio", s.ratio},
            {"reject_normality", s.hc_max > s.asymptotic_threshold}}}};
}

void write_boundary_csv(std::ostream& out, const BoundaryCurve& curve,
                        const RunManifest& manifest) {
  out << "# manifest " << to_json(manifest).dump() << '\n';
  const bool sparse = curve.kind == BoundaryKind::sparse;
  out << (sparse ? "variant,eps,mu,m_star,found\n" : "mu,m_star,found\n");
  for (const BoundaryPoint& p : curve.points) {
    if (sparse) out << to_string(p.spec.kind) << ',' << format_double(p.spec.eps) << ',';
    out << format_double(p.spec.mu) << ',';
    if (p.crossing.m_star) {
      out << *p.crossing.m_star << ",true\n";
    } else {
      out << "NA,false\n";
    }
  }
}

json boundary_to_json(const BoundaryCurve& curve, const RunManifest& manifest) {
  json points = json::array();
  for (const BoundaryPoint& p : curve.points) {
    json trace = json::array();
    for (const TracePoint& tp : p.crossing.trace) {
      trace.push_back({{"m", tp.m},
                       {"aggregated_hc", tp.aggregated_hc},
                       {"threshold", tp.threshold},
                       {"replicate_hc", tp.replicate_hc}});
    }
    json jp = {{"generator", to_string(p.spec.kind)},
               {"eps", p.spec.eps},
               {"mu", p.spec.mu},
               {"found", p.crossing.m_star.has_value()},
               {"trace", std::move(trace)}};
    jp["m_star"] = p.crossing.m_star ? json(*p.crossing.m_star) : json(nullptr);
    points.push_back(std::move(jp));
  }
  return {{"schema_version", kSchemaVersion},
          {"manifest", to_json(manifest)},
          {"kind", curve.kind == BoundaryKind::sparse ? "sparse" : "mean_shift"},
          {"points", std::move(points)}};
}

void write_masked_csv(std::ostream& out, const TimeSeries& series, const DetectionReport& report,
                      const RunManifest& manifest) {
  out << "# manifest " << to_json(manifest).dump() << '\n';
  out << "index,value";
  for (std::size_t j = 0; j < report.per_threshold.size(); ++j) out << ",threshold_" << j;
  out << '\n';

  std::vector<TimeSeries> masked;
  masked.reserve(report.per_threshold.size());
  for (const auto& d : report.per_threshold) masked.push_back(mask(series, d.segments));

  const auto values = series.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << i << ',' << format_double(values[i]);
    for (const auto& ms : masked) out << ',' << format_double(ms.values()[i]);
    out << '\n';
  }
}

}  // namespace hcdetect
