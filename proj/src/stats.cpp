#include "freightcast/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "freightcast/errors.hpp"

namespace freightcast::stats {

double norm_cdf(double x) {
  static const boost::math::normal_distribution<double> dist;
  return boost::math::cdf(dist, x);
}

double norm_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw RangeError("normal quantile requires p in (0,1), got " + std::to_string(p));
  }
  static const boost::math::normal_distribution<double> dist;
  return boost::math::quantile(dist, p);
}

double chi2_sf(double x, int df) {
  if (df <= 0) {
    throw DegreeOfFreedomError("chi-square degrees of freedom must be positive, got " +
                               std::to_string(df));
  }
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x, int ddof) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - static_cast<std::size_t>(ddof));
}

double skewness(std::span<const double> x) {
  const double m = mean(x);
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
  const double m = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

double GaussianSampler::uniform() {
  // 53-bit mantissa draw, strictly inside (0,1)
  return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace freightcast::stats
