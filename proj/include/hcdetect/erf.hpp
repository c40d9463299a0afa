#pragma once

namespace hcdetect::special {

// Rational Chebyshev approximations after W. J. Cody (Math. Comp. 1969).
// Three intervals: |x| <= 0.46875 evaluates erf directly, 0.46875 < |x| <= 4
// and |x| > 4 evaluate erfc, so the tail keeps full relative precision.

double erf(double x) noexcept;
double erfc(double x) noexcept;

}  // namespace hcdetect::special
