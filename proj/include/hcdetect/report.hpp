#pragma once

// Serialization of detection reports and boundary curves. Every artifact
// embeds a RunManifest; everything outside the manifest is the payload and
// depends only on the manifest's configuration and input.

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hcdetect/detector.hpp"
#include "hcdetect/simlab.hpp"

namespace hcdetect {

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string input_digest;  // empty for commands without input
  std::string created_utc;   // the only field allowed to differ between reruns
};

/// Fills tool identity and the current UTC timestamp.
RunManifest make_manifest(std::string command, nlohmann::json config, std::uint64_t seed,
                          std::string input_digest = {});

nlohmann::json to_json(const RunManifest& manifest);

nlohmann::json config_to_json(const DetectionConfig& config);
nlohmann::json config_to_json(const SimConfig& config);

/// {schema_version, manifest, stats, hc, clusters, thresholds}.
nlohmann::json report_to_json(const DetectionReport& report, const TimeSeries& series,
                              const RunManifest& manifest);

struct SeriesSummary {
  std::size_t m = 0;
  double mean = 0.0;
  double sd = 0.0;
  KurtosisReport kurtosis;
  double hc_max = 0.0;
  double asymptotic_threshold = 0.0;
  double ratio = 0.0;
};

SeriesSummary summarize(const TimeSeries& series, const HcOptions& options = {});

nlohmann::json summary_to_json(const SeriesSummary& summary, const RunManifest& manifest);

/// One "# manifest {...}" line, then the header and one row per point:
/// mean_shift "mu,m_star,found"; sparse "variant,eps,mu,m_star,found".
/// m_star is "NA" when not found.
void write_boundary_csv(std::ostream& out, const BoundaryCurve& curve, const RunManifest& manifest);

nlohmann::json boundary_to_json(const BoundaryCurve& curve, const RunManifest& manifest);

/// index,value,threshold_0..threshold_{k-1}: the series masked by each
/// threshold's segments, for plotting.
void write_masked_csv(std::ostream& out, const TimeSeries& series, const DetectionReport& report,
                      const RunManifest& manifest);

}  // namespace hcdetect
