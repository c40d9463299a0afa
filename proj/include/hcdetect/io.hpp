#pragma once

// Series ingestion: headerless or single-header CSV and raw little-endian
// float64.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcdetect/hc.hpp"

namespace hcdetect {

enum class InputFormat { csv_single_column, csv_time_value, raw_f64_le };

std::optional<InputFormat> parse_input_format(std::string_view name);
std::string_view to_string(InputFormat format);

struct InputSpec {
  std::filesystem::path path;
  InputFormat format = InputFormat::csv_single_column;
  /// 0-based CSV column. Defaults to column 0 for csv_single_column and
  /// column 1 (the value) for csv_time_value.
  std::optional<std::size_t> channel;
  std::optional<double> sample_rate_hz;
};

/// Whole file as bytes. Throws Error(io_error).
std::string read_file(const std::filesystem::path& path);

/// Values of one CSV column. A first line that does not parse as numbers is
/// taken as a header. Throws Error(parse_error) naming line and column, and
/// Error(non_finite) naming the first NaN/inf row.
std::vector<double> parse_csv(std::string_view text, InputFormat format,
                              std::optional<std::size_t> channel = std::nullopt);

/// Throws Error(parse_error) when the byte count is not a multiple of 8 and
/// Error(non_finite) naming the first NaN/inf index.
std::vector<double> decode_raw_f64_le(std::string_view bytes);
std::string encode_raw_f64_le(std::span<const double> values);
void write_raw_f64_le(const std::filesystem::path& path, std::span<const double> values);

TimeSeries ingest(const InputSpec& spec);

struct Ingested {
  TimeSeries series;
  std::string digest;  // content_digest of the file bytes
};

Ingested ingest_with_digest(const InputSpec& spec);

/// FNV-1a 64-bit content digest, "fnv1a64:<16 hex digits>".
std::string content_digest(std::string_view bytes);

/// %.17g formatting; round-trips every finite double.
std::string format_double(double v);

}  // namespace hcdetect
