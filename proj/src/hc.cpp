#include "hcdetect/hc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hcdetect/erf.hpp"
#include "hcdetect/error.hpp"

namespace hcdetect {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_length(std::size_t m) {
  if (m < 3) {
    throw Error(Errc::too_short, "series needs at least 3 samples, got " + std::to_string(m));
  }
}

double hc_at(std::size_t rank, double sqrt_m, double m, double p) noexcept {
  return sqrt_m * (static_cast<double>(rank) / m - p) / std::sqrt(p * (1.0 - p));
}

std::size_t max_rank(std::size_t m, const HcOptions& options) noexcept {
  return options.restricted_rank_range ? std::max<std::size_t>(1, m / 2) : m;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, std::optional<double> sample_rate_hz)
    : values_(std::move(values)), sample_rate_hz_(sample_rate_hz) {
  require_length(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(Errc::non_finite, "sample " + std::to_string(i) + " is not finite");
    }
  }
  if (sample_rate_hz_ && !(*sample_rate_hz_ > 0.0 && std::isfinite(*sample_rate_hz_))) {
    throw Error(Errc::domain_error, "sample rate must be a positive finite number");
  }
}

Moments population_moments(std::span<const double> values) {
  if (values.empty()) return {};
  long double sum = 0.0L;
  for (double v : values) sum += v;
  const long double mean = sum / static_cast<long double>(values.size());
  long double ss = 0.0L;
  for (double v : values) {
    const long double d = v - mean;
    ss += d * d;
  }
  return {static_cast<double>(mean),
          static_cast<double>(std::sqrt(ss / static_cast<long double>(values.size())))};
}

StandardizedSeries standardize(const TimeSeries& series) {
  const auto values = series.values();
  const Moments mo = population_moments(values);
  if (!(mo.sd > 0.0)) throw Error(Errc::zero_variance, "series has zero variance");

  StandardizedSeries out;
  out.source_mean = mo.mean;
  out.source_sd = mo.sd;
  out.values.resize(values.size());
  std::transform(values.begin(), values.end(), out.values.begin(),
                 [&](double v) { return (v - mo.mean) / mo.sd; });
  return out;
}

double two_sided_p_unclamped(double x) noexcept { return special::erfc(std::fabs(x) * kInvSqrt2); }

double two_sided_p(double x) noexcept {
  return std::clamp(two_sided_p_unclamped(x), kPValueFloor, kPValueCeiling);
}

std::vector<double> hc_from_sorted_p(std::span<const double> sorted_p) {
  const std::size_t m = sorted_p.size();
  const double md = static_cast<double>(m);
  const double sqrt_m = std::sqrt(md);
  std::vector<double> hc(m);
  for (std::size_t r = 0; r < m; ++r) hc[r] = hc_at(r + 1, sqrt_m, md, sorted_p[r]);
  return hc;
}

HCProfile hc_profile(std::span<const double> scores, const HcOptions& options) {
  const std::size_t m = scores.size();
  require_length(m);

  std::vector<double> p(m);
  std::transform(scores.begin(), scores.end(), p.begin(), two_sided_p);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  HCProfile prof;
  prof.records.resize(m);
  std::vector<double> sorted_p(m);
  for (std::size_t r = 0; r < m; ++r) {
    sorted_p[r] = p[order[r]];
    prof.records[r] = {sorted_p[r], order[r], r + 1};
  }
  prof.hc_values = hc_from_sorted_p(sorted_p);

  const auto last = prof.hc_values.begin() + static_cast<std::ptrdiff_t>(max_rank(m, options));
  const auto it = std::max_element(prof.hc_values.begin(), last);
  prof.hc_max = *it;
  prof.argmax_rank = static_cast<std::size_t>(it - prof.hc_values.begin()) + 1;
  prof.asymptotic_threshold = asymptotic_threshold(m);
  return prof;
}

HCProfile hc_profile(const StandardizedSeries& standardized, const HcOptions& options) {
  return hc_profile(std::span<const double>(standardized.values), options);
}

HCProfile hc_profile(const TimeSeries& series, const HcOptions& options) {
  return hc_profile(standardize(series), options);
}

double hc_max_of_scores(std::span<const double> scores, const HcOptions& options) {
  const std::size_t m = scores.size();
  require_length(m);
  std::vector<double> p(m);
  std::transform(scores.begin(), scores.end(), p.begin(), two_sided_p);
  std::sort(p.begin(), p.end());

  const double md = static_cast<double>(m);
  const double sqrt_m = std::sqrt(md);
  const std::size_t last = max_rank(m, options);
  double best = hc_at(1, sqrt_m, md, p[0]);
  for (std::size_t r = 1; r < last; ++r) best = std::max(best, hc_at(r + 1, sqrt_m, md, p[r]));
  return best;
}

double asymptotic_threshold(std::size_t m) {
  if (m < 3) {
    throw Error(Errc::domain_error,
                "sqrt(2 ln ln m) needs m >= 3, got " + std::to_string(m));
  }
  return std::sqrt(2.0 * std::log(std::log(static_cast<double>(m))));
}

double tukey_hc(std::size_t m, double alpha, double fraction) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::domain_error, "alpha must lie in (0, 1)");
  if (m < 1) throw Error(Errc::domain_error, "m must be positive");
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(Errc::domain_error, "fraction must lie in [0, 1]");
  }
  return std::sqrt(static_cast<double>(m)) * (fraction - alpha) / std::sqrt(alpha * (1.0 - alpha));
}

KurtosisReport kurtosis(const TimeSeries& series) {
  const auto values = series.values();
  const Moments mo = population_moments(values);
  if (!(mo.sd > 0.0)) throw Error(Errc::zero_variance, "series has zero variance");

  long double m4 = 0.0L;
  for (double v : values) {
    const long double z = (v - static_cast<long double>(mo.mean)) / mo.sd;
    const long double z2 = z * z;
    m4 += z2 * z2;
  }
  KurtosisReport k;
  k.raw = static_cast<double>(m4 / static_cast<long double>(values.size()));
  k.excess = k.raw - 3.0;
  return k;
}

}  // namespace hcdetect
