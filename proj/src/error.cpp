#include "hcdetect/error.hpp"

namespace hcdetect {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::too_short: return "TooShort";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::non_finite: return "NonFinite";
    case Errc::domain_error: return "DomainError";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::undefined: return "Undefined";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::no_clusters: return "NoClusters";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace hcdetect
