#pragma once

#include <random>
#include <vector>

#include "freightcast/period.hpp"
#include "freightcast/timeseries.hpp"

namespace helpers {

// Independent Gaussian draws for test data; mt19937 keeps them reproducible.
inline std::vector<double> gaussian_draws(std::uint64_t seed, std::size_t n, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  auto uniform = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  for (std::size_t i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * M_PI * uniform();
    out[i] = sd * r * std::cos(a);
    if (i + 1 < n) out[i + 1] = sd * r * std::sin(a);
  }
  return out;
}

// AR(1) path built by direct recursion (not via the engine)
inline std::vector<double> ar1_path(std::uint64_t seed, std::size_t n, double coef, double sd = 1.0,
                                    std::size_t burn = 200) {
  const auto eps = gaussian_draws(seed, n + burn, sd);
  std::vector<double> out(n + burn, 0.0);
  for (std::size_t t = 1; t < out.size(); ++t) out[t] = coef * out[t - 1] + eps[t];
  return {out.begin() + static_cast<std::ptrdiff_t>(burn), out.end()};
}

inline freightcast::TimeSeries monthly_series(std::vector<double> values, int year = 2000,
                                              int month = 1) {
  return freightcast::TimeSeries(freightcast::Period::monthly(year, month), std::move(values));
}

}  // namespace helpers
