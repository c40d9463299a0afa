#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcdetect {

enum class Errc {
  too_short,
  zero_variance,
  non_finite,
  domain_error,
  too_few_points,
  undefined,
  index_out_of_range,
  no_clusters,
  io_error,
  parse_error,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

  /// True for bad input (exit code 2 at the CLI), false for I/O failures.
  bool is_validation() const noexcept { return code_ != Errc::io_error; }

 private:
  Errc code_;
};

}  // namespace hcdetect
