#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace freightcast::arma {

/// Coefficients of the expanded AR lag polynomial phi(L) * seasonal_phi(L^S),
/// returned in the recursion convention y_t = sum_j coef[j] * y_{t-j} + ...
/// (i.e. the a_j of 1 - a_1 L - ... after multiplying out both factors).
std::vector<double> expand_ar(std::span<const double> ar, std::span<const double> sar, int S);

/// Same expansion for the MA side, convention e_t + sum_j coef[j] * e_{t-j}.
std::vector<double> expand_ma(std::span<const double> ma, std::span<const double> sma, int S);

/// True when 1 - a_1 z - ... - a_p z^p has all roots outside the unit circle.
bool ar_is_stationary(std::span<const double> ar_coeffs);

/// True when 1 + m_1 z + ... + m_q z^q has all roots outside the unit circle.
bool ma_is_invertible(std::span<const double> ma_coeffs);

// Bijections between partial autocorrelations in (-1,1) and the stationary
// (AR) / invertible (MA) coefficient regions, via the Durbin-Levinson
// recursion. Unconstrained optimization runs on atanh of the partials.
std::vector<double> pacf_to_ar(std::span<const double> pacf);
std::vector<double> pacf_to_ma(std::span<const double> pacf);
/// Inverse maps; return false when the input lies outside the bijection's range.
bool ar_to_pacf(std::span<const double> ar, std::vector<double>& pacf_out);
bool ma_to_pacf(std::span<const double> ma, std::vector<double>& pacf_out);

/// Harvey-form ARMA state space: alpha_{t+1} = T alpha_t + R eps_{t+1},
/// y_t = alpha_t[0], with state dimension m = max(p, q+1).
struct StateSpace {
  Eigen::MatrixXd transition;  // T
  Eigen::VectorXd impact;      // R
  int dim = 0;
};
StateSpace make_state_space(std::span<const double> phi, std::span<const double> theta);

/// Solves P = T P T' + Q by the doubling iteration. Requires the spectral
/// radius of T to be below one; throws NumericalError otherwise.
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& transition,
                                        const Eigen::MatrixXd& noise_cov);

}  // namespace freightcast::arma
