#pragma once

#include <wigner/errors.hpp>

#include <boost/math/distributions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace wigner {

/// Moments of the GOE (beta = 1) Tracy-Widom law, taken from the numerical
/// Painleve II literature. Confirmed in the test suite against simulated GOE
/// edge fluctuations.
struct Tw1Moments {
  static constexpr double mean = -1.2065335745820;
  static constexpr double variance = 1.607781034581;
  static constexpr double skewness = 0.2934645240;
};

/// Shifted gamma law X = G - shift, G ~ Gamma(shape, scale).
struct GammaApprox {
  double shape;
  double scale;
  double shift;

  double mean() const noexcept { return shape * scale - shift; }
  double variance() const noexcept { return shape * scale * scale; }
  double skewness() const noexcept { return 2.0 / std::sqrt(shape); }
  double mode() const noexcept { return (shape - 1.0) * scale - shift; }

  double pdf(double x) const {
    const double g = x + shift;
    if (!(g > 0.0)) return 0.0;
    if (std::isinf(g)) return 0.0;
    return boost::math::pdf(boost::math::gamma_distribution<double>(shape, scale), g);
  }
  double cdf(double x) const {
    const double g = x + shift;
    if (!(g > 0.0)) return 0.0;
    if (std::isinf(g)) return 1.0;
    return boost::math::cdf(boost::math::gamma_distribution<double>(shape, scale), g);
  }
};

/// Matches mean, variance and skewness of TW1. The skewness is positive, so
/// the gamma law is used without reflection.
inline GammaApprox tw1_gamma_params() {
  const double k = 4.0 / (Tw1Moments::skewness * Tw1Moments::skewness);
  const double theta = std::sqrt(Tw1Moments::variance / k);
  return {k, theta, k * theta - Tw1Moments::mean};
}

inline double tw1_pdf(double x) {
  static const GammaApprox g = tw1_gamma_params();
  return g.pdf(x);
}

inline double tw1_cdf(double x) {
  static const GammaApprox g = tw1_gamma_params();
  return g.cdf(x);
}

/// Two-sided Kolmogorov-Smirnov statistic of samples against a continuous cdf.
inline double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw PreconditionError("ks_distance: no samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / m - f, f - i / m});
  }
  return d;
}

}  // namespace wigner
