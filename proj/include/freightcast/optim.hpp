#pragma once

#include <Eigen/Dense>
#include <functional>

namespace freightcast::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Options {
  int max_iterations = 400;
  double gradient_tol = 1e-5;  ///< on ||g||_inf, scaled by max(1, |f|)
  double f_tol = 1e-11;        ///< relative objective decrease considered stalled
};

struct Result {
  Eigen::VectorXd x;
  double fval = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

/// Central-difference gradient with per-coordinate steps rel_step * max(1, |x_i|).
Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x,
                                   double rel_step = 1e-6);

/// Central-difference Hessian, symmetrized.
Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x,
                                  double rel_step = 1e-4);

/// BFGS with numerical gradients and Armijo backtracking line search.
Result minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const Options& opts = {});

/// Nelder-Mead simplex search.
Result minimize_nelder_mead(const Objective& f, Eigen::VectorXd x0, const Options& opts = {});

}  // namespace freightcast::optim
