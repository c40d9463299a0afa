#pragma once

// Higher-criticism kernel: standardization, two-sided Gaussian p-values,
// the rank-ordered HC statistic and its asymptotic rejection level.
//
// Everything here is a pure function of its arguments.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hcdetect {

/// Lower and upper p-value clamp. Keeps p(1-p) away from zero in the HC
/// denominator.
inline constexpr double kPValueFloor = 0.00001;
inline constexpr double kPValueCeiling = 0.99999;

/// A sampled series of length >= 3 with finite values. The sample rate is
/// carried as metadata only; nothing in the pipeline depends on units.
class TimeSeries {
 public:
  /// Throws Error(too_short) for fewer than 3 samples, Error(non_finite)
  /// naming the first NaN/inf index.
  explicit TimeSeries(std::vector<double> values,
                      std::optional<double> sample_rate_hz = std::nullopt);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::optional<double> sample_rate_hz() const noexcept { return sample_rate_hz_; }

 private:
  std::vector<double> values_;
  std::optional<double> sample_rate_hz_;
};

struct StandardizedSeries {
  std::vector<double> values;
  double source_mean = 0.0;
  double source_sd = 1.0;  // population standard deviation
};

/// Population mean and standard deviation (divide by m).
struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments population_moments(std::span<const double> values);

/// (x - mean) / sd with population moments. Throws Error(zero_variance).
StandardizedSeries standardize(const TimeSeries& series);

/// P(|N(0,1)| > |x|) = erfc(|x| / sqrt 2), before clamping.
double two_sided_p_unclamped(double x) noexcept;

/// two_sided_p_unclamped clamped into [kPValueFloor, kPValueCeiling].
double two_sided_p(double x) noexcept;

struct PValueRecord {
  double p = 0.0;
  std::size_t original_index = 0;
  std::size_t rank = 0;  // 1-based
};

struct HcOptions {
  /// When set, hc_max is taken over ranks i <= m/2 only. hc_values always
  /// covers the full rank range.
  bool restricted_rank_range = false;
};

struct HCProfile {
  std::vector<double> hc_values;       // hc_values[r] is HC_{m, r+1}
  std::vector<PValueRecord> records;   // records[r] has rank r+1
  double hc_max = 0.0;
  std::size_t argmax_rank = 1;         // 1-based rank attaining hc_max
  double asymptotic_threshold = 0.0;   // sqrt(2 ln ln m)

  std::size_t size() const noexcept { return hc_values.size(); }
  /// hc_max / asymptotic_threshold.
  double ratio() const noexcept { return hc_max / asymptotic_threshold; }
};

/// HC_{m,i} = sqrt(m) (i/m - p_(i)) / sqrt(p_(i) (1 - p_(i))) for every rank
/// of an ascending p-value sequence.
std::vector<double> hc_from_sorted_p(std::span<const double> sorted_p);

/// Profile of already-standardized scores. Ties in p keep original-index
/// order (stable sort). Throws Error(too_short) when m < 3.
HCProfile hc_profile(std::span<const double> scores, const HcOptions& options = {});
HCProfile hc_profile(const StandardizedSeries& standardized, const HcOptions& options = {});

/// Standardizes first; propagates standardize errors.
HCProfile hc_profile(const TimeSeries& series, const HcOptions& options = {});

/// hc_max of scores without building the rank permutation. Bit-identical to
/// hc_profile(scores).hc_max.
double hc_max_of_scores(std::span<const double> scores, const HcOptions& options = {});

/// sqrt(2 ln ln m). Throws Error(domain_error) for m < 3.
double asymptotic_threshold(std::size_t m);

/// Tukey's HC at a single level alpha; reject when the result exceeds 2.
double tukey_hc(std::size_t m, double alpha, double fraction);

inline constexpr double kTukeyRejectLevel = 2.0;

struct KurtosisReport {
  double raw = 0.0;     // E[((X - mu)/sigma)^4], population moments
  double excess = 0.0;  // raw - 3
};

/// Throws Error(zero_variance) for constant input.
KurtosisReport kurtosis(const TimeSeries& series);

}  // namespace hcdetect
