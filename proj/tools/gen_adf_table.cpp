// Regenerates src/adf_surface.inc, the Dickey-Fuller tau quantile response
// surfaces used for ADF p-values. For each deterministic-terms case and each
// sample size, the tau statistic is simulated under the unit-root null, the
// requested quantiles are extracted, and a per-quantile response surface
//   tau_q(n) = b0 + b1/n + b2/n^2
// is fitted across sample sizes, following the functional form of MacKinnon
// (2010), "Critical Values for Cointegration Tests". The b0 column can be
// checked against MacKinnon's published asymptotic critical values
// (constant: -3.43/-2.86/-2.57 at 1%/5%/10%).
//
// Usage: gen_adf_table [replications] > ../src/adf_surface.inc

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "freightcast/stats.hpp"

namespace {

const std::vector<double> kPGrid = {
    0.001, 0.002, 0.003, 0.005, 0.0075, 0.01,  0.015, 0.02,  0.03, 0.04,
    0.05,  0.06,  0.07,  0.08,  0.09,   0.10,  0.125, 0.15,  0.20, 0.25,
    0.30,  0.35,  0.40,  0.45,  0.50,   0.55,  0.60,  0.65,  0.70, 0.75,
    0.80,  0.85,  0.90,  0.925, 0.95,   0.975, 0.99,  0.995, 0.999};

const std::vector<int> kSampleSizes = {25, 50, 100, 250, 500, 1000, 2500};

double df_tau(const std::vector<double>& x, bool with_trend) {
  const std::size_t rows = x.size() - 1;
  const int ncoef = with_trend ? 3 : 2;
  Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
  Eigen::Vector3d xty = Eigen::Vector3d::Zero();
  double syy = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double dy = x[r + 1] - x[r];
    const double row[3] = {x[r], 1.0, static_cast<double>(r + 1)};
    for (int i = 0; i < ncoef; ++i) {
      for (int j = i; j < ncoef; ++j) xtx(i, j) += row[i] * row[j];
      xty(i) += row[i] * dy;
    }
    syy += dy * dy;
  }
  for (int i = 0; i < ncoef; ++i) {
    for (int j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);
  }
  const auto top = xtx.topLeftCorner(ncoef, ncoef);
  const auto rhs = xty.head(ncoef);
  const Eigen::MatrixXd inv = top.inverse();
  const Eigen::VectorXd beta = inv * rhs;
  const double rss = syy - beta.dot(rhs);
  const double s2 = rss / static_cast<double>(rows - static_cast<std::size_t>(ncoef));
  return beta(0) / std::sqrt(s2 * inv(0, 0));
}

double quantile(const std::vector<double>& sorted, double p) {
  const double idx = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = idx - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 400000;

  std::printf("// Generated by tools/gen_adf_table.cpp with %d replications per sample size.\n",
              reps);
  std::printf("// Response surfaces tau_q(n) = b0 + b1/n + b2/n^2 for the Dickey-Fuller\n");
  std::printf("// t-statistic under the unit-root null; n is the regression sample size.\n");
  std::printf("// Functional form follows MacKinnon (2010); see tools/gen_adf_table.cpp.\n\n");
  std::printf("constexpr std::size_t kAdfGridSize = %zu;\n\n", kPGrid.size());
  std::printf("constexpr double kAdfPGrid[kAdfGridSize] = {\n");
  for (std::size_t i = 0; i < kPGrid.size(); ++i) {
    std::printf("    %.4f,%s", kPGrid[i], (i + 1) % 6 == 0 || i + 1 == kPGrid.size() ? "\n" : "");
  }
  std::printf("};\n");

  for (const bool with_trend : {false, true}) {
    // quantiles[q][size index]
    std::vector<std::vector<double>> quantiles(kPGrid.size(),
                                               std::vector<double>(kSampleSizes.size()));
    for (std::size_t si = 0; si < kSampleSizes.size(); ++si) {
      const int t_len = kSampleSizes[si];
      freightcast::stats::GaussianSampler noise(0x5eed0000u + 977u * static_cast<unsigned>(si) +
                                                (with_trend ? 7919u : 0u));
      std::vector<double> taus(static_cast<std::size_t>(reps));
      std::vector<double> x(static_cast<std::size_t>(t_len));
      for (int r = 0; r < reps; ++r) {
        x[0] = noise.next();
        for (int t = 1; t < t_len; ++t) x[static_cast<std::size_t>(t)] = x[t - 1] + noise.next();
        taus[static_cast<std::size_t>(r)] = df_tau(x, with_trend);
      }
      std::sort(taus.begin(), taus.end());
      for (std::size_t qi = 0; qi < kPGrid.size(); ++qi) {
        quantiles[qi][si] = quantile(taus, kPGrid[qi]);
      }
      std::fprintf(stderr, "done %s T=%d\n", with_trend ? "ct" : "c", t_len);
    }

    std::printf("\nconstexpr double %s[kAdfGridSize][3] = {\n",
                with_trend ? "kAdfSurfaceConstantTrend" : "kAdfSurfaceConstant");
    for (std::size_t qi = 0; qi < kPGrid.size(); ++qi) {
      Eigen::MatrixXd design(kSampleSizes.size(), 3);
      Eigen::VectorXd target(kSampleSizes.size());
      for (std::size_t si = 0; si < kSampleSizes.size(); ++si) {
        const double n = static_cast<double>(kSampleSizes[si] - 1);
        design(static_cast<Eigen::Index>(si), 0) = 1.0;
        design(static_cast<Eigen::Index>(si), 1) = 1.0 / n;
        design(static_cast<Eigen::Index>(si), 2) = 1.0 / (n * n);
        target(static_cast<Eigen::Index>(si)) = quantiles[qi][si];
      }
      const Eigen::Vector3d b = design.colPivHouseholderQr().solve(target);
      std::printf("    {%.6f, %.4f, %.1f},  // p=%.4f\n", b(0), b(1), b(2), kPGrid[qi]);
    }
    std::printf("};\n");
  }
  return 0;
}
