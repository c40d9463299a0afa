#include "hcdetect/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hcdetect/error.hpp"

namespace hcdetect {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xFF);
    return r;
  }
  return v;
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "csv_single_column" || name == "csv") return InputFormat::csv_single_column;
  if (name == "csv_time_value") return InputFormat::csv_time_value;
  if (name == "raw_f64_le" || name == "raw") return InputFormat::raw_f64_le;
  return std::nullopt;
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::csv_single_column: return "csv_single_column";
    case InputFormat::csv_time_value: return "csv_time_value";
    case InputFormat::raw_f64_le: return "raw_f64_le";
  }
  return "unknown";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_error, "failed reading " + path.string());
  return std::move(buf).str();
}

std::vector<double> parse_csv(std::string_view text, InputFormat format,
                              std::optional<std::size_t> channel) {
  if (format == InputFormat::raw_f64_le) {
    throw Error(Errc::parse_error, "raw_f64_le is not a CSV format");
  }
  const std::size_t column =
      channel.value_or(format == InputFormat::csv_time_value ? std::size_t{1} : std::size_t{0});

  std::vector<double> values;
  std::size_t line_no = 0;
  bool first_content_line = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    const auto fields = split_fields(line);
    if (first_content_line) {
      first_content_line = false;
      bool numeric = true;
      for (auto f : fields) numeric = numeric && parse_number(f).has_value();
      if (!numeric) continue;  // header
    }
    if (column >= fields.size()) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + " has " +
                                         std::to_string(fields.size()) + " columns, need column " +
                                         std::to_string(column));
    }
    const auto v = parse_number(fields[column]);
    if (!v) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ", column " +
                                         std::to_string(column) + ": cannot parse '" +
                                         std::string(trim(fields[column])) + "'");
    }
    if (!std::isfinite(*v)) {
      throw Error(Errc::non_finite, "row " + std::to_string(values.size()) + " (line " +
                                        std::to_string(line_no) + ") is not finite");
    }
    values.push_back(*v);
  }
  return values;
}

std::vector<double> decode_raw_f64_le(std::string_view bytes) {
  if (bytes.size() % 8 != 0) {
    throw Error(Errc::parse_error, "raw input has " + std::to_string(bytes.size()) +
                                       " bytes; trailing partial value at offset " +
                                       std::to_string(bytes.size() - bytes.size() % 8));
  }
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes.data() + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little_endian(bits));
    if (!std::isfinite(values[i])) {
      throw Error(Errc::non_finite, "value " + std::to_string(i) + " (byte offset " +
                                        std::to_string(8 * i) + ") is not finite");
    }
  }
  return values;
}

std::string encode_raw_f64_le(std::span<const double> values) {
  std::string out(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(out.data() + 8 * i, &bits, 8);
  }
  return out;
}

void write_raw_f64_le(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  const std::string bytes = encode_raw_f64_le(values);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

Ingested ingest_with_digest(const InputSpec& spec) {
  const std::string bytes = read_file(spec.path);
  std::vector<double> values = spec.format == InputFormat::raw_f64_le
                                   ? decode_raw_f64_le(bytes)
                                   : parse_csv(bytes, spec.format, spec.channel);
  return {TimeSeries(std::move(values), spec.sample_rate_hz), content_digest(bytes)};
}

TimeSeries ingest(const InputSpec& spec) { return ingest_with_digest(spec).series; }

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string("fnv1a64:") + buf;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace hcdetect
