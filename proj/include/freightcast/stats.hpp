#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace freightcast::stats {

double norm_cdf(double x);
double norm_ppf(double p);          ///< inverse standard normal CDF, p in (0,1)
double chi2_sf(double x, int df);   ///< upper-tail chi-square probability

double mean(std::span<const double> x);
double variance(std::span<const double> x, int ddof = 1);
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);

/// Standard-normal sampler on top of the (bit-specified) mt19937_64 stream.
/// Box-Muller keeps the draw sequence independent of the standard library's
/// unspecified normal_distribution algorithm.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next();
  double uniform();  ///< on (0,1)

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace freightcast::stats
