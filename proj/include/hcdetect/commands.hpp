#pragma once

// Command implementations behind the CLI. Each returns the process exit code:
// 0 success, 1 runtime (I/O) error, 2 validation error. Diagnostics go to
// `err`; when no output path is given the artifact goes to `out`.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "hcdetect/detector.hpp"
#include "hcdetect/io.hpp"
#include "hcdetect/simlab.hpp"

namespace hcdetect {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

struct DetectCommand {
  InputSpec input;
  DetectionConfig config;
  std::optional<std::filesystem::path> out;         // JSON report
  std::optional<std::filesystem::path> masked_csv;  // per-threshold masked series
};

struct SimulateCommand {
  BoundaryKind kind = BoundaryKind::mean_shift;
  std::vector<double> mu_grid;
  std::vector<double> eps_grid;
  SimConfig config;
  std::optional<std::filesystem::path> out;    // CSV
  std::optional<std::filesystem::path> trace;  // JSON; defaults to `out` with .json
};

struct StatsCommand {
  InputSpec input;
  HcOptions options;
};

int cmd_detect(const DetectCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsCommand& cmd, std::ostream& out, std::ostream& err);

/// "100,1000,10000" or geometric "LO:HI:N". Throws Error(domain_error).
std::vector<std::size_t> parse_m_grid(std::string_view text);

}  // namespace hcdetect
