#include "freightcast/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace freightcast::optim {

namespace {

constexpr double kHuge = 1e30;

double guarded(const Objective& f, const Eigen::VectorXd& x, int& evaluations) {
  ++evaluations;
  const double v = f(x);
  return std::isfinite(v) ? v : kHuge;
}

}  // namespace

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x,
                                   double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x,
                                  double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = rel_step * std::max(1.0, std::abs(x[i]));

  const double f0 = f(x);
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp[i] = x[i] + h[i];
    const double fp = f(xp);
    xp[i] = x[i] - h[i];
    const double fm = f(xp);
    xp[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      xp[i] = x[i] + h[i];
      xp[j] = x[j] + h[j];
      const double fpp = f(xp);
      xp[j] = x[j] - h[j];
      const double fpm = f(xp);
      xp[i] = x[i] - h[i];
      const double fmm = f(xp);
      xp[j] = x[j] + h[j];
      const double fmp = f(xp);
      xp[i] = x[i];
      xp[j] = x[j];
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

Result minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const Options& opts) {
  const Eigen::Index n = x0.size();
  Result res;
  res.x = std::move(x0);
  res.fval = guarded(f, res.x, res.evaluations);

  auto grad = [&](const Eigen::VectorXd& x) {
    res.evaluations += 2 * static_cast<int>(n);
    return numerical_gradient(f, x);
  };

  Eigen::VectorXd g = grad(res.x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool first_update = true;

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tol * std::max(1.0, std::abs(res.fval))) {
      res.converged = true;
      return res;
    }

    Eigen::VectorXd dir = -(hinv * g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {  // lost descent direction, reset to steepest descent
      hinv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
      first_update = true;
    }

    // Armijo backtracking
    double alpha = 1.0;
    const double c1 = 1e-4;
    double fnew = kHuge;
    Eigen::VectorXd xnew;
    bool found = false;
    for (int ls = 0; ls < 50; ++ls) {
      xnew = res.x + alpha * dir;
      fnew = guarded(f, xnew, res.evaluations);
      if (fnew <= res.fval + c1 * alpha * slope) {
        found = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!found) {
      // no progress possible along this direction at any sensible step
      res.converged =
          g.lpNorm<Eigen::Infinity>() <= 1e3 * opts.gradient_tol * std::max(1.0, std::abs(res.fval));
      return res;
    }

    Eigen::VectorXd gnew = grad(xnew);
    const Eigen::VectorXd s = xnew - res.x;
    const Eigen::VectorXd y = gnew - g;
    const double sy = s.dot(y);

    const double fprev = res.fval;
    res.x = std::move(xnew);
    res.fval = fnew;
    g = std::move(gnew);

    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first_update) {
        hinv = (sy / y.squaredNorm()) * Eigen::MatrixXd::Identity(n, n);
        first_update = false;
      }
      const Eigen::VectorXd hy = hinv * y;
      const double yhy = y.dot(hy);
      // BFGS inverse update
      hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose());
      const Eigen::MatrixXd cross = hy * s.transpose();
      hinv -= (cross + cross.transpose()) / sy;
    }

    if (std::abs(fprev - res.fval) <= opts.f_tol * (std::abs(fprev) + 1.0)) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

Result minimize_nelder_mead(const Objective& f, Eigen::VectorXd x0, const Options& opts) {
  const Eigen::Index n = x0.size();
  Result res;
  res.x = x0;

  const int max_iter = std::max(opts.max_iterations, 200) * static_cast<int>(n);

  std::vector<Eigen::VectorXd> simplex;
  simplex.reserve(static_cast<std::size_t>(n) + 1);
  simplex.push_back(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = x0;
    v[i] += (v[i] != 0.0) ? 0.05 * v[i] : 0.00025;
    simplex.push_back(std::move(v));
  }
  std::vector<double> fvals(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i) fvals[i] = guarded(f, simplex[i], res.evaluations);

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
  };

  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    sort_simplex();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    const double fspread = std::abs(fvals[worst] - fvals[best]);
    if (fspread <= 1e-10 * (std::abs(fvals[best]) + 1e-10)) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double frefl = guarded(f, reflected, res.evaluations);

    if (frefl < fvals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fexp = guarded(f, expanded, res.evaluations);
      if (fexp < frefl) {
        simplex[worst] = expanded;
        fvals[worst] = fexp;
      } else {
        simplex[worst] = reflected;
        fvals[worst] = frefl;
      }
    } else if (frefl < fvals[second_worst]) {
      simplex[worst] = reflected;
      fvals[worst] = frefl;
    } else {
      const bool outside = frefl < fvals[worst];
      const Eigen::VectorXd& toward = outside ? reflected : simplex[worst];
      const Eigen::VectorXd contracted = centroid + 0.5 * (toward - centroid);
      const double fcon = guarded(f, contracted, res.evaluations);
      if (fcon < std::min(frefl, fvals[worst])) {
        simplex[worst] = contracted;
        fvals[worst] = fcon;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 0; i < simplex.size(); ++i) {
          if (i == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          fvals[i] = guarded(f, simplex[i], res.evaluations);
        }
      }
    }
  }

  sort_simplex();
  res.x = simplex[order.front()];
  res.fval = fvals[order.front()];
  return res;
}

}  // namespace freightcast::optim
