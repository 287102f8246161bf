#include "freightcast/sarimax.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freightcast/arma_math.hpp"
#include "freightcast/optim.hpp"
#include "freightcast/stats.hpp"

namespace freightcast {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

struct Reduced {
  std::vector<double> ytrans;  // transformed endog, full length
  std::vector<double> w;       // transformed + differenced endog
  Eigen::MatrixXd exog_diff;   // differenced exog, w.size() x k
  std::vector<std::vector<double>> exog_raw;  // aligned raw exog columns
};

std::vector<double> aligned_exog_values(const TimeSeries& endog, const TimeSeries& exog,
                                        std::size_t index) {
  if (exog.frequency() != endog.frequency()) {
    throw AlignmentError("covariate " + std::to_string(index) +
                         " frequency differs from the endogenous series");
  }
  const auto first = exog.index_of(endog.start());
  const auto last = exog.index_of(endog.end());
  if (!first || !last) {
    throw AlignmentError("covariate " + std::to_string(index) + " does not cover [" +
                         endog.start().to_string() + ", " + endog.end().to_string() + "]");
  }
  return {exog.values().begin() + static_cast<std::ptrdiff_t>(*first),
          exog.values().begin() + static_cast<std::ptrdiff_t>(*last) + 1};
}

Reduced prepare(const ModelOrder& order, const TimeSeries& endog,
                const std::vector<TimeSeries>& exog) {
  order.validate();
  const DifferenceSpec spec = order.diff_spec();
  if (static_cast<std::size_t>(spec.depth()) >= endog.size()) {
    throw LengthError("series of length " + std::to_string(endog.size()) +
                      " cannot support differencing depth " + std::to_string(spec.depth()));
  }
  Reduced red;
  red.ytrans.resize(endog.size());
  for (std::size_t i = 0; i < endog.size(); ++i) red.ytrans[i] = order.transform.apply(endog[i]);
  red.w = difference_values(red.ytrans, spec);

  const std::size_t k = exog.size();
  red.exog_diff.resize(static_cast<Eigen::Index>(red.w.size()), static_cast<Eigen::Index>(k));
  red.exog_raw.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto vals = aligned_exog_values(endog, exog[j], j);
    const auto diffed = difference_values(vals, spec);
    for (std::size_t t = 0; t < diffed.size(); ++t) {
      red.exog_diff(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = diffed[t];
    }
    red.exog_raw.push_back(std::move(vals));
  }
  return red;
}

void validate_params(const ModelOrder& order, const ParamVector& params, std::size_t k_exog,
                     bool allow_zero_sigma = false) {
  if (params.intercept.has_value() != order.with_intercept) {
    throw RangeError("intercept presence does not match the model order");
  }
  auto check = [](std::size_t got, int want, const char* what) {
    if (got != static_cast<std::size_t>(want)) {
      throw RangeError(std::string("parameter block '") + what + "' has size " +
                       std::to_string(got) + ", expected " + std::to_string(want));
    }
  };
  check(params.ar.size(), order.p, "ar");
  check(params.ma.size(), order.q, "ma");
  check(params.sar.size(), order.P, "sar");
  check(params.sma.size(), order.Q, "sma");
  check(params.beta.size(), static_cast<int>(k_exog), "beta");
  if (allow_zero_sigma ? params.sigma2 < 0.0 : !(params.sigma2 > 0.0)) {
    throw RangeError(allow_zero_sigma ? "sigma2 must be non-negative"
                                      : "sigma2 must be strictly positive");
  }
}

// regression-adjusted observation sequence fed to the ARMA filter
std::vector<double> regression_residual(const Reduced& red, const ParamVector& params) {
  std::vector<double> u(red.w);
  const double c = params.intercept.value_or(0.0);
  for (std::size_t t = 0; t < u.size(); ++t) {
    double fit = c;
    for (std::size_t j = 0; j < params.beta.size(); ++j) {
      fit += params.beta[j] *
             red.exog_diff(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
    }
    u[t] -= fit;
  }
  return u;
}

struct FilterResult {
  double loglik = 0.0;
  std::vector<double> innovations;
  std::vector<double> innovation_vars;
  Eigen::VectorXd state_next;  // predicted state for the first post-sample period
  Eigen::MatrixXd cov_next;
};

FilterResult run_filter(const arma::StateSpace& ss, const std::vector<double>& u, double sigma2,
                        bool keep_innovations) {
  const int m = ss.dim;
  const Eigen::MatrixXd noise = sigma2 * (ss.impact * ss.impact.transpose());
  Eigen::MatrixXd cov = arma::solve_discrete_lyapunov(ss.transition, noise);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(m);

  FilterResult res;
  if (keep_innovations) {
    res.innovations.resize(u.size());
    res.innovation_vars.resize(u.size());
  }

  bool steady = false;
  double fvar = 0.0;
  Eigen::VectorXd gain(m);
  for (std::size_t t = 0; t < u.size(); ++t) {
    if (!steady) {
      fvar = cov(0, 0);
      if (!(fvar > 0.0) || !std::isfinite(fvar)) {
        throw NumericalError("filter innovation variance lost positive definiteness");
      }
      gain = cov.col(0) / fvar;
    }
    const double innov = u[t] - state(0);
    res.loglik += -0.5 * (kLogTwoPi + std::log(fvar) + innov * innov / fvar);
    if (keep_innovations) {
      res.innovations[t] = innov;
      res.innovation_vars[t] = fvar;
    }
    state = ss.transition * (state + gain * innov);
    if (!steady) {
      const Eigen::MatrixXd updated = cov - cov.col(0) * cov.row(0) / fvar;
      Eigen::MatrixXd next = ss.transition * updated * ss.transition.transpose() + noise;
      next = 0.5 * (next + next.transpose()).eval();
      if ((next - cov).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + cov.cwiseAbs().maxCoeff())) {
        steady = true;
      }
      cov = std::move(next);
    }
  }
  res.state_next = std::move(state);
  res.cov_next = std::move(cov);
  return res;
}

double loglik_from_reduced(const ModelOrder& order, const ParamVector& params,
                           const Reduced& red) {
  const auto phi = arma::expand_ar(params.ar, params.sar, order.S);
  const auto theta = arma::expand_ma(params.ma, params.sma, order.S);
  const auto ss = arma::make_state_space(phi, theta);
  const auto u = regression_residual(red, params);
  return run_filter(ss, u, params.sigma2, false).loglik;
}

// --- optimizer parameterization -------------------------------------------

struct Layout {
  bool intercept = false;
  int k_exog = 0, p = 0, q = 0, sp = 0, sq = 0;

  int size() const { return (intercept ? 1 : 0) + k_exog + p + q + sp + sq + 1; }
};

Layout layout_of(const ModelOrder& order, std::size_t k_exog) {
  return Layout{order.with_intercept, static_cast<int>(k_exog),
                order.p, order.q, order.P, order.Q};
}

std::vector<double> block_to_unconstrained(const std::vector<double>& coef, bool is_ma,
                                           bool enforce) {
  if (!enforce) return coef;
  std::vector<double> pacf;
  const bool ok = is_ma ? arma::ma_to_pacf(coef, pacf) : arma::ar_to_pacf(coef, pacf);
  if (!ok) {
    throw RangeError("coefficients are outside the stationary/invertible region");
  }
  for (double& r : pacf) {
    r = std::atanh(std::clamp(r, -1.0 + 1e-12, 1.0 - 1e-12));
  }
  return pacf;
}

std::vector<double> block_to_natural(std::span<const double> raw, bool is_ma, bool enforce) {
  std::vector<double> coef(raw.begin(), raw.end());
  if (!enforce) return coef;
  for (double& v : coef) v = std::tanh(v);
  return is_ma ? arma::pacf_to_ma(coef) : arma::pacf_to_ar(coef);
}

Eigen::VectorXd pack_unconstrained(const ParamVector& params, const Layout& lay, bool enforce) {
  Eigen::VectorXd x(lay.size());
  int at = 0;
  if (lay.intercept) x(at++) = *params.intercept;
  for (double b : params.beta) x(at++) = b;
  for (double v : block_to_unconstrained(params.ar, false, enforce)) x(at++) = v;
  for (double v : block_to_unconstrained(params.ma, true, enforce)) x(at++) = v;
  for (double v : block_to_unconstrained(params.sar, false, enforce)) x(at++) = v;
  for (double v : block_to_unconstrained(params.sma, true, enforce)) x(at++) = v;
  x(at++) = std::log(params.sigma2);
  return x;
}

ParamVector unpack_natural(const Eigen::VectorXd& x, const Layout& lay, bool enforce) {
  ParamVector p;
  int at = 0;
  if (lay.intercept) p.intercept = x(at++);
  p.beta.resize(static_cast<std::size_t>(lay.k_exog));
  for (double& b : p.beta) b = x(at++);
  auto take = [&](int count) {
    std::vector<double> raw(static_cast<std::size_t>(count));
    for (double& v : raw) v = x(at++);
    return raw;
  };
  p.ar = block_to_natural(take(lay.p), false, enforce);
  p.ma = block_to_natural(take(lay.q), true, enforce);
  p.sar = block_to_natural(take(lay.sp), false, enforce);
  p.sma = block_to_natural(take(lay.sq), true, enforce);
  p.sigma2 = std::exp(x(at++));
  return p;
}

// natural-space packing used for the standard-error Hessian
Eigen::VectorXd pack_natural(const ParamVector& params, const Layout& lay) {
  Eigen::VectorXd x(lay.size());
  int at = 0;
  if (lay.intercept) x(at++) = *params.intercept;
  for (double b : params.beta) x(at++) = b;
  for (double v : params.ar) x(at++) = v;
  for (double v : params.ma) x(at++) = v;
  for (double v : params.sar) x(at++) = v;
  for (double v : params.sma) x(at++) = v;
  x(at++) = params.sigma2;
  return x;
}

ParamVector unpack_plain(const Eigen::VectorXd& x, const Layout& lay) {
  ParamVector p;
  int at = 0;
  if (lay.intercept) p.intercept = x(at++);
  auto take = [&](int count) {
    std::vector<double> raw(static_cast<std::size_t>(count));
    for (double& v : raw) v = x(at++);
    return raw;
  };
  p.beta = take(lay.k_exog);
  p.ar = take(lay.p);
  p.ma = take(lay.q);
  p.sar = take(lay.sp);
  p.sma = take(lay.sq);
  p.sigma2 = x(at++);
  return p;
}

// conditional-least-squares starting values
ParamVector initial_params(const ModelOrder& order, const Reduced& red, const Layout& lay) {
  const std::size_t n = red.w.size();
  ParamVector init;

  // intercept and covariate coefficients by least squares
  const int ncols = (lay.intercept ? 1 : 0) + lay.k_exog;
  std::vector<double> u = red.w;
  if (ncols > 0) {
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), ncols);
    Eigen::VectorXd target(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
      int col = 0;
      if (lay.intercept) design(static_cast<Eigen::Index>(t), col++) = 1.0;
      for (int j = 0; j < lay.k_exog; ++j) {
        design(static_cast<Eigen::Index>(t), col++) = red.exog_diff(static_cast<Eigen::Index>(t), j);
      }
      target(static_cast<Eigen::Index>(t)) = red.w[t];
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
    int col = 0;
    if (lay.intercept) init.intercept = beta(col++);
    init.beta.resize(static_cast<std::size_t>(lay.k_exog));
    for (int j = 0; j < lay.k_exog; ++j) init.beta[static_cast<std::size_t>(j)] = beta(col++);
    const Eigen::VectorXd resid = target - design * beta;
    for (std::size_t t = 0; t < n; ++t) u[t] = resid(static_cast<Eigen::Index>(t));
  } else {
    init.beta.clear();
  }

  // conditional least squares for the AR blocks, zeros for the MA blocks
  init.ma.assign(static_cast<std::size_t>(lay.q), 0.0);
  init.sma.assign(static_cast<std::size_t>(lay.sq), 0.0);
  init.ar.assign(static_cast<std::size_t>(lay.p), 0.0);
  init.sar.assign(static_cast<std::size_t>(lay.sp), 0.0);

  const int max_lag = std::max(lay.p, lay.sp * order.S);
  double resid_var = stats::variance(u, 0);
  if (max_lag > 0 && n > static_cast<std::size_t>(max_lag) + 4) {
    const std::size_t rows = n - static_cast<std::size_t>(max_lag);
    const int ncoef = lay.p + lay.sp;
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), ncoef);
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t t = r + static_cast<std::size_t>(max_lag);
      target(static_cast<Eigen::Index>(r)) = u[t];
      int col = 0;
      for (int i = 1; i <= lay.p; ++i) {
        design(static_cast<Eigen::Index>(r), col++) = u[t - static_cast<std::size_t>(i)];
      }
      for (int i = 1; i <= lay.sp; ++i) {
        design(static_cast<Eigen::Index>(r), col++) =
            u[t - static_cast<std::size_t>(i * order.S)];
      }
    }
    const Eigen::VectorXd coefs = design.colPivHouseholderQr().solve(target);
    std::vector<double> ar(static_cast<std::size_t>(lay.p));
    std::vector<double> sar(static_cast<std::size_t>(lay.sp));
    for (int i = 0; i < lay.p; ++i) ar[static_cast<std::size_t>(i)] = coefs(i);
    for (int i = 0; i < lay.sp; ++i) sar[static_cast<std::size_t>(i)] = coefs(lay.p + i);
    // fall back to zero starts when CLS lands outside the stationary region
    std::vector<double> probe;
    if (arma::ar_to_pacf(ar, probe)) init.ar = std::move(ar);
    if (arma::ar_to_pacf(sar, probe)) init.sar = std::move(sar);
    const Eigen::VectorXd resid = target - design * coefs;
    resid_var = resid.squaredNorm() / static_cast<double>(rows);
  }

  const double wmean = stats::mean(red.w);
  const double wvar = stats::variance(red.w, 0);
  if (wvar <= 1e-20 * (1.0 + wmean * wmean)) {
    throw DegenerateError("the differenced series is constant; likelihood is unbounded");
  }
  init.sigma2 = std::max(resid_var, 1e-8 * wvar);
  return init;
}

std::vector<double> difference_polynomial(const DifferenceSpec& spec) {
  // coefficients of (1-L)^d (1-L^S)^D, leading 1
  std::vector<double> poly{1.0};
  auto convolve_with = [&poly](const std::vector<double>& factor) {
    std::vector<double> out(poly.size() + factor.size() - 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      for (std::size_t j = 0; j < factor.size(); ++j) out[i + j] += poly[i] * factor[j];
    }
    poly = std::move(out);
  };
  for (int i = 0; i < spec.d; ++i) convolve_with({1.0, -1.0});
  std::vector<double> seasonal(static_cast<std::size_t>(spec.S) + 1, 0.0);
  seasonal.front() = 1.0;
  seasonal.back() = -1.0;
  for (int i = 0; i < spec.D; ++i) convolve_with(seasonal);
  return poly;
}

FittedModel finalize(const ModelOrder& order, const ParamVector& params, const Reduced& red,
                     const TimeSeries& endog, const std::vector<TimeSeries>& exog, bool converged,
                     std::vector<std::string> warnings) {
  const auto phi = arma::expand_ar(params.ar, params.sar, order.S);
  const auto theta = arma::expand_ma(params.ma, params.sma, order.S);
  const auto ss = arma::make_state_space(phi, theta);
  const auto u = regression_residual(red, params);
  const auto flt = run_filter(ss, u, params.sigma2, true);

  const int k = static_cast<int>(params.count());
  std::vector<double> std_resid(flt.innovations.size());
  for (std::size_t t = 0; t < std_resid.size(); ++t) {
    std_resid[t] = flt.innovations[t] / std::sqrt(flt.innovation_vars[t]);
  }

  return FittedModel{
      .order = order,
      .params = params,
      .loglik = flt.loglik,
      .aic = 2.0 * static_cast<double>(k) - 2.0 * flt.loglik,
      .k_params = k,
      .std_errors = {},
      .exog_p_values = {},
      .residuals = TimeSeries(endog.start().plus(order.diff_spec().depth()), flt.innovations),
      .std_residuals = std::move(std_resid),
      .converged = converged,
      .warnings = std::move(warnings),
      .endog = endog,
      .exog = exog,
  };
}

}  // namespace

void ModelOrder::validate() const {
  if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0) {
    throw RangeError("model orders must be non-negative");
  }
  if (S < 1) {
    throw RangeError("seasonal period S must be positive");
  }
  if ((P > 0 || D > 0 || Q > 0) && S < 2) {
    throw RangeError("seasonal terms require S >= 2");
  }
}

std::string ModelOrder::to_string() const {
  std::ostringstream os;
  os << "(" << p << "," << d << "," << q << ")";
  if (P > 0 || D > 0 || Q > 0) os << "(" << P << "," << D << "," << Q << "," << S << ")";
  if (transform.kind != TransformKind::None) os << "+" << freightcast::to_string(transform.kind);
  if (with_intercept) os << "+c";
  return os.str();
}

double kalman_loglik(const ModelOrder& order, const ParamVector& params, const TimeSeries& endog,
                     const std::vector<TimeSeries>& exog) {
  validate_params(order, params, exog.size());
  const Reduced red = prepare(order, endog, exog);
  return loglik_from_reduced(order, params, red);
}

FittedModel evaluate_at(const ModelOrder& order, const ParamVector& params,
                        const TimeSeries& endog, const std::vector<TimeSeries>& exog) {
  validate_params(order, params, exog.size());
  const Reduced red = prepare(order, endog, exog);
  return finalize(order, params, red, endog, exog, true, {});
}

FittedModel fit(const ModelOrder& order, const TimeSeries& endog,
                const std::vector<TimeSeries>& exog, const FitOptions& options) {
  const Reduced red = prepare(order, endog, exog);
  const Layout lay = layout_of(order, exog.size());
  const std::size_t n_used = red.w.size();
  const std::size_t k = static_cast<std::size_t>(lay.size());

  std::vector<std::string> warnings;
  if (n_used < 5 * k) {
    throw InsufficientDataError("usable sample of " + std::to_string(n_used) +
                                " observations is below five per parameter (" +
                                std::to_string(k) + " parameters)");
  }
  if (n_used < 10 * k) {
    warnings.push_back("usable sample below ten observations per parameter; estimates may be unstable");
  }

  const bool enforce = options.enforce_stationarity;
  const auto objective = [&](const Eigen::VectorXd& x) -> double {
    try {
      const ParamVector p = unpack_natural(x, lay, enforce);
      return -loglik_from_reduced(order, p, red);
    } catch (const Error&) {
      return 1e30;
    }
  };

  const ParamVector start = initial_params(order, red, lay);
  const Eigen::VectorXd x0 = pack_unconstrained(start, lay, enforce);

  optim::Options opt_options;
  opt_options.max_iterations = options.max_iterations;
  auto best = optim::minimize_bfgs(objective, x0, opt_options);
  if (!best.converged) {
    // simplex restart, then polish with the quasi-Newton pass again
    auto simplex = optim::minimize_nelder_mead(objective, best.x, opt_options);
    auto polished = optim::minimize_bfgs(objective, simplex.x, opt_options);
    if (polished.fval <= best.fval) best = polished;
    if (!best.converged) {
      warnings.push_back("optimizer did not meet the convergence criterion; best point kept");
    }
  }

  const ParamVector params = unpack_natural(best.x, lay, enforce);
  FittedModel model = finalize(order, params, red, endog, exog, best.converged, warnings);

  if (options.compute_std_errors) {
    const auto natural_objective = [&](const Eigen::VectorXd& x) -> double {
      try {
        const ParamVector p = unpack_plain(x, lay);
        if (!(p.sigma2 > 0.0)) return 1e30;
        return -loglik_from_reduced(order, p, red);
      } catch (const Error&) {
        return 1e30;
      }
    };
    const Eigen::VectorXd theta = pack_natural(params, lay);
    const Eigen::MatrixXd hess = optim::numerical_hessian(natural_objective, theta);
    bool ok = hess.allFinite();
    Eigen::MatrixXd cov;
    if (ok) {
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
      if (ok) {
        cov = ldlt.solve(Eigen::MatrixXd::Identity(theta.size(), theta.size()));
        for (Eigen::Index i = 0; i < theta.size() && ok; ++i) ok = cov(i, i) > 0.0;
      }
    }
    if (ok) {
      model.std_errors.resize(static_cast<std::size_t>(theta.size()));
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        model.std_errors[static_cast<std::size_t>(i)] = std::sqrt(cov(i, i));
      }
      const int beta_offset = lay.intercept ? 1 : 0;
      model.exog_p_values.resize(params.beta.size());
      for (std::size_t j = 0; j < params.beta.size(); ++j) {
        const double se = model.std_errors[static_cast<std::size_t>(beta_offset) + j];
        const double z = std::abs(params.beta[j]) / se;
        model.exog_p_values[j] = 2.0 * (1.0 - stats::norm_cdf(z));
      }
    } else {
      model.warnings.push_back("numerical Hessian is singular; standard errors unavailable");
    }
  }
  return model;
}

Forecast forecast(const FittedModel& model, int horizon,
                  const std::vector<TimeSeries>& future_exog, double level) {
  if (horizon < 1) {
    throw RangeError("forecast horizon must be positive");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw RangeError("confidence level must lie in (0,1)");
  }
  const std::size_t k = model.exog.size();
  if (k > 0 && future_exog.size() != k) {
    throw ExogMissingError("model has " + std::to_string(k) + " covariates but " +
                           std::to_string(future_exog.size()) + " future paths were supplied");
  }
  if (k == 0 && !future_exog.empty()) {
    throw ExogMissingError("model has no covariates; future exog must be empty");
  }

  const ModelOrder& order = model.order;
  const Reduced red = prepare(order, model.endog, model.exog);
  const std::size_t h = static_cast<std::size_t>(horizon);
  const Period first = model.endog.end().next();

  // differenced future covariate paths, continuing the training columns
  Eigen::MatrixXd exog_future(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    const TimeSeries& path = future_exog[j];
    if (path.frequency() != model.endog.frequency()) {
      throw AlignmentError("future covariate " + std::to_string(j) + " frequency mismatch");
    }
    std::vector<double> full = red.exog_raw[j];
    for (std::size_t i = 0; i < h; ++i) {
      const auto idx = path.index_of(first.plus(static_cast<std::int64_t>(i)));
      if (!idx) {
        throw ExogMissingError("future covariate " + std::to_string(j) + " does not cover " +
                               first.plus(static_cast<std::int64_t>(i)).to_string());
      }
      full.push_back(path[*idx]);
    }
    const auto diffed = difference_values(full, order.diff_spec());
    for (std::size_t i = 0; i < h; ++i) {
      exog_future(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          diffed[diffed.size() - h + i];
    }
  }

  const auto phi = arma::expand_ar(model.params.ar, model.params.sar, order.S);
  const auto theta = arma::expand_ma(model.params.ma, model.params.sma, order.S);
  const auto ss = arma::make_state_space(phi, theta);
  const auto u = regression_residual(red, model.params);
  auto flt = run_filter(ss, u, model.params.sigma2, false);

  // joint forecast distribution of the differenced series
  const Eigen::MatrixXd noise = model.params.sigma2 * (ss.impact * ss.impact.transpose());
  Eigen::VectorXd mu(static_cast<Eigen::Index>(h));
  Eigen::MatrixXd sigma(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h));
  Eigen::VectorXd state = flt.state_next;
  Eigen::MatrixXd cov = flt.cov_next;
  const double c = model.params.intercept.value_or(0.0);
  for (std::size_t i = 0; i < h; ++i) {
    double reg = c;
    for (std::size_t j = 0; j < k; ++j) {
      reg += model.params.beta[j] *
             exog_future(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    mu(static_cast<Eigen::Index>(i)) = reg + state(0);
    sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = cov(0, 0);
    Eigen::VectorXd prop = cov.col(0);
    for (std::size_t fwd = i + 1; fwd < h; ++fwd) {
      prop = (ss.transition * prop).eval();
      sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(fwd)) = prop(0);
      sigma(static_cast<Eigen::Index>(fwd), static_cast<Eigen::Index>(i)) = prop(0);
    }
    state = ss.transition * state;
    cov = (ss.transition * cov * ss.transition.transpose() + noise).eval();
  }

  // integrate the differencing back out: y_t = w_t + sum_j delta_j y_{t-j}
  const DifferenceSpec spec = order.diff_spec();
  const auto poly = difference_polynomial(spec);
  const std::size_t depth = static_cast<std::size_t>(spec.depth());
  const std::size_t n = red.ytrans.size();
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h),
                                               static_cast<Eigen::Index>(h));
  Eigen::VectorXd offsets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
  for (std::size_t t = 0; t < h; ++t) {
    rows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) = 1.0;
    for (std::size_t j = 1; j <= depth; ++j) {
      const double delta = -poly[j];
      if (t >= j) {
        rows.row(static_cast<Eigen::Index>(t)) += delta * rows.row(static_cast<Eigen::Index>(t - j));
        offsets(static_cast<Eigen::Index>(t)) += delta * offsets(static_cast<Eigen::Index>(t - j));
      } else {
        offsets(static_cast<Eigen::Index>(t)) += delta * red.ytrans[n + t - j];
      }
    }
  }

  const Eigen::VectorXd mean_trans = offsets + rows * mu;
  const double zq = stats::norm_ppf(0.5 + level / 2.0);

  Forecast out{.start = first, .median = {}, .lower = {}, .upper = {}, .level = level};
  out.median.resize(h);
  out.lower.resize(h);
  out.upper.resize(h);
  for (std::size_t t = 0; t < h; ++t) {
    const double var =
        (rows.row(static_cast<Eigen::Index>(t)) * sigma * rows.row(static_cast<Eigen::Index>(t)).transpose())(0);
    const double sd = std::sqrt(std::max(var, 0.0));
    double med = mean_trans(static_cast<Eigen::Index>(t));
    double lo = med - zq * sd;
    double hi = med + zq * sd;
    if (order.transform.kind == TransformKind::Sqrt) {
      // the transformed scale is non-negative; truncate before squaring so the
      // inverse stays monotone
      med = std::max(med, 0.0);
      lo = std::max(lo, 0.0);
      hi = std::max(hi, 0.0);
    }
    out.median[t] = order.transform.invert(med);
    out.lower[t] = order.transform.invert(lo);
    out.upper[t] = order.transform.invert(hi);
  }
  return out;
}

TimeSeries simulate(const ModelOrder& order, const ParamVector& params, std::size_t n,
                    std::uint64_t seed, const std::vector<TimeSeries>& exog,
                    std::optional<Period> start) {
  validate_params(order, params, exog.size(), /*allow_zero_sigma=*/true);
  order.validate();
  const DifferenceSpec spec = order.diff_spec();
  if (n == 0 || n <= static_cast<std::size_t>(spec.depth())) {
    throw LengthError("simulation length must exceed the differencing depth");
  }
  const Period start_period =
      start.value_or(exog.empty() ? Period::monthly(2000, 1) : exog.front().start());

  const auto phi = arma::expand_ar(params.ar, params.sar, order.S);
  const auto theta = arma::expand_ma(params.ma, params.sma, order.S);
  if (!arma::ar_is_stationary(phi)) {
    throw InstabilityError("AR polynomial is explosive; simulation would diverge");
  }

  const std::size_t n_arma = n - static_cast<std::size_t>(spec.depth());
  const std::size_t burn = 200 + 2 * (phi.size() + theta.size());
  stats::GaussianSampler noise(seed);
  const double sd = std::sqrt(params.sigma2);

  std::vector<double> eps(burn + n_arma);
  std::vector<double> arma_path(burn + n_arma, 0.0);
  for (std::size_t t = 0; t < eps.size(); ++t) {
    eps[t] = sd * noise.next();
    double v = eps[t];
    for (std::size_t i = 0; i < phi.size() && i < t; ++i) v += phi[i] * arma_path[t - i - 1];
    for (std::size_t j = 0; j < theta.size() && j < t; ++j) v += theta[j] * eps[t - j - 1];
    arma_path[t] = v;
  }

  // regression structure on the differenced scale
  std::vector<double> w(n_arma);
  Eigen::MatrixXd exog_diff;
  if (!exog.empty()) {
    const TimeSeries probe(start_period, std::vector<double>(n, 0.0));
    exog_diff.resize(static_cast<Eigen::Index>(n_arma), static_cast<Eigen::Index>(exog.size()));
    for (std::size_t j = 0; j < exog.size(); ++j) {
      auto vals = aligned_exog_values(probe, exog[j], j);
      const auto diffed = difference_values(vals, spec);
      for (std::size_t t = 0; t < n_arma; ++t) {
        exog_diff(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = diffed[t];
      }
    }
  }
  const double c = params.intercept.value_or(0.0);
  for (std::size_t t = 0; t < n_arma; ++t) {
    double v = c + arma_path[burn + t];
    for (std::size_t j = 0; j < params.beta.size(); ++j) {
      v += params.beta[j] * exog_diff(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
    }
    w[t] = v;
  }

  const std::vector<double> zeros(static_cast<std::size_t>(spec.depth()), 0.0);
  auto integrated = inverse_difference_values(w, spec, zeros);
  for (double& v : integrated) {
    if (std::abs(v) > 1e12) {
      throw InstabilityError("simulated path overflowed");
    }
    v = order.transform.invert(v);
  }
  return TimeSeries(start_period, std::move(integrated));
}

ResidualSummary residual_diagnostics(const FittedModel& model, int lb_lags) {
  const std::vector<double>& z = model.std_residuals;
  const int n = static_cast<int>(z.size());
  const int h = lb_lags > 0 ? lb_lags : std::min(10, n / 5);
  ResidualSummary out;
  out.ljung_box = ljung_box(z, h, model.order.arma_param_count());
  out.mean = stats::mean(z);
  out.variance = stats::variance(z, 1);
  out.skewness = stats::skewness(z);
  out.excess_kurtosis = stats::excess_kurtosis(z);
  return out;
}

}  // namespace freightcast
