#include "freightcast/arma_math.hpp"

#include <cmath>

#include "freightcast/errors.hpp"

namespace freightcast::arma {

namespace {

// product of lag polynomials given as full coefficient vectors with leading 1
std::vector<double> poly_multiply(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> lag_polynomial(std::span<const double> coeffs, int stride, double sign) {
  // 1 + sign * c_1 L^stride + sign * c_2 L^(2*stride) + ...
  std::vector<double> poly(coeffs.size() * static_cast<std::size_t>(stride) + 1, 0.0);
  poly[0] = 1.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    poly[(i + 1) * static_cast<std::size_t>(stride)] = sign * coeffs[i];
  }
  return poly;
}

std::vector<double> expand(std::span<const double> plain, std::span<const double> seasonal, int S,
                           double sign) {
  const auto product =
      poly_multiply(lag_polynomial(plain, 1, sign), lag_polynomial(seasonal, S, sign));
  std::vector<double> out(product.size() - 1);
  for (std::size_t j = 1; j < product.size(); ++j) out[j - 1] = sign * product[j];
  return out;
}

bool companion_is_stable(std::span<const double> recursion_coeffs) {
  const std::size_t p = recursion_coeffs.size();
  if (p == 0) return true;
  if (p == 1) return std::abs(recursion_coeffs[0]) < 1.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                    static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) companion(0, static_cast<Eigen::Index>(i)) = recursion_coeffs[i];
  for (std::size_t i = 1; i < p; ++i) companion(static_cast<Eigen::Index>(i),
                                                static_cast<Eigen::Index>(i - 1)) = 1.0;
  const auto eigenvalues = companion.eigenvalues();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues(i)) >= 1.0 - 1e-12) return false;
  }
  return true;
}

}  // namespace

std::vector<double> expand_ar(std::span<const double> ar, std::span<const double> sar, int S) {
  return expand(ar, sar, S, -1.0);
}

std::vector<double> expand_ma(std::span<const double> ma, std::span<const double> sma, int S) {
  return expand(ma, sma, S, +1.0);
}

bool ar_is_stationary(std::span<const double> ar_coeffs) {
  return companion_is_stable(ar_coeffs);
}

bool ma_is_invertible(std::span<const double> ma_coeffs) {
  std::vector<double> negated(ma_coeffs.begin(), ma_coeffs.end());
  for (double& v : negated) v = -v;
  return companion_is_stable(negated);
}

std::vector<double> pacf_to_ar(std::span<const double> pacf) {
  std::vector<double> coef(pacf.begin(), pacf.end());
  std::vector<double> work = coef;
  for (std::size_t j = 1; j < coef.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) work[k] -= pacf[j] * coef[j - k - 1];
    std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(j), coef.begin());
  }
  return coef;
}

std::vector<double> pacf_to_ma(std::span<const double> pacf) {
  std::vector<double> coef(pacf.begin(), pacf.end());
  std::vector<double> work = coef;
  for (std::size_t j = 1; j < coef.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) work[k] += pacf[j] * coef[j - k - 1];
    std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(j), coef.begin());
  }
  return coef;
}

namespace {

bool unwind(std::span<const double> coeffs, std::vector<double>& pacf_out, double sign) {
  std::vector<double> cur(coeffs.begin(), coeffs.end());
  std::vector<double> work(cur.size());
  for (std::size_t j = cur.size(); j-- > 1;) {
    const double a = cur[j];
    if (std::abs(a) >= 1.0) return false;
    for (std::size_t k = 0; k < j; ++k) {
      work[k] = (cur[k] + sign * a * cur[j - k - 1]) / (1.0 - a * a);
    }
    std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(j), cur.begin());
  }
  if (!cur.empty() && std::abs(cur[0]) >= 1.0) return false;
  pacf_out = cur;
  return true;
}

}  // namespace

bool ar_to_pacf(std::span<const double> ar, std::vector<double>& pacf_out) {
  return unwind(ar, pacf_out, +1.0);
}

bool ma_to_pacf(std::span<const double> ma, std::vector<double>& pacf_out) {
  return unwind(ma, pacf_out, -1.0);
}

StateSpace make_state_space(std::span<const double> phi, std::span<const double> theta) {
  const int m = std::max(static_cast<int>(phi.size()), static_cast<int>(theta.size()) + 1);
  StateSpace ss;
  ss.dim = m;
  ss.transition = Eigen::MatrixXd::Zero(m, m);
  ss.impact = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < static_cast<int>(phi.size()); ++i) {
    ss.transition(i, 0) = phi[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i + 1 < m; ++i) ss.transition(i, i + 1) = 1.0;
  ss.impact(0) = 1.0;
  for (int j = 0; j < static_cast<int>(theta.size()); ++j) {
    ss.impact(j + 1) = theta[static_cast<std::size_t>(j)];
  }
  return ss;
}

Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& transition,
                                        const Eigen::MatrixXd& noise_cov) {
  Eigen::MatrixXd a = transition;
  Eigen::MatrixXd x = noise_cov;
  for (int iter = 0; iter < 128; ++iter) {
    const Eigen::MatrixXd increment = a * x * a.transpose();
    const double inc_norm = increment.cwiseAbs().maxCoeff();
    x += increment;
    a = (a * a).eval();
    if (inc_norm <= 1e-16 * (1.0 + x.cwiseAbs().maxCoeff())) {
      return x;
    }
    if (!x.allFinite()) break;
  }
  throw NumericalError(
      "stationary covariance iteration did not converge; the AR polynomial is "
      "at or beyond the stationarity boundary");
}

}  // namespace freightcast::arma
