#pragma once

// Derivative-free and quasi-Newton minimization under box constraints.
//
// Bounds are handled by the fminsearchbnd device: each coordinate is written
// as x = lower + (upper - lower) * sin^2(z) and the search runs over the
// unconstrained z. Any z maps inside [lower, upper].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "betarc/errors.hpp"

namespace betarc {

class BoxTransform {
 public:
  BoxTransform(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) throw DataError("bound vectors differ in length");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!(lower_[i] < upper_[i])) throw DataError("lower bound must be below upper bound");
    }
  }

  std::size_t size() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }

  std::vector<double> to_bounded(const std::vector<double>& z) const {
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double s = std::sin(z[i]);
      x[i] = std::clamp(lower_[i] + (upper_[i] - lower_[i]) * s * s, lower_[i], upper_[i]);
    }
    return x;
  }

  std::vector<double> to_unbounded(const std::vector<double>& x) const {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double frac = std::clamp((x[i] - lower_[i]) / (upper_[i] - lower_[i]), 0.0, 1.0);
      z[i] = std::asin(std::sqrt(frac));
    }
    return z;
  }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct NelderMeadOptions {
  std::size_t max_iterations = 5000;
  double tolerance = 1e-8;     // on max |f_i - f_best| over the simplex
  bool record_history = false;  // best value after every iteration
};

struct OptimResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Unconstrained Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5) with the fminsearch initial simplex.
template <class F>
OptimResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opts = {}) {
  const std::size_t n = x0.size();
  if (n == 0) throw DataError("nelder_mead needs at least one coordinate");
  OptimResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  fv[0] = eval(x0);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] = x0[i] != 0.0 ? 1.05 * x0[i] : 0.00025;
    fv[i + 1] = eval(simplex[i + 1]);
  }
  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = std::move(simplex[order[i]]);
      f2[i] = fv[order[i]];
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };
  auto spread = [&] {
    const double d = fv[n] - fv[0];
    return std::isfinite(d) ? d : std::numeric_limits<double>::infinity();
  };
  auto affine = [&](const std::vector<double>& c, double coef) {
    // c + coef * (c - worst)
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = c[j] + coef * (c[j] - simplex[n][j]);
    return out;
  };

  sort_simplex();
  while (res.iterations < opts.max_iterations) {
    if (spread() <= opts.tolerance) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    const auto xr = affine(centroid, 1.0);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < fv[0]) {
      const auto xe = affine(centroid, 2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else if (fr < fv[n]) {
      const auto xc = affine(centroid, 0.5);
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      const auto xcc = affine(centroid, -0.5);
      const double fcc = eval(xcc);
      if (fcc < fv[n]) {
        simplex[n] = xcc;
        fv[n] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
        }
        fv[i] = eval(simplex[i]);
      }
    }
    sort_simplex();
    if (opts.record_history) res.history.push_back(fv[0]);
  }
  if (!res.converged && spread() <= opts.tolerance) res.converged = true;
  res.x = simplex[0];
  res.value = fv[0];
  return res;
}

/// Nelder-Mead over the box, searching in sin^2-transformed coordinates.
/// The returned x is in the original (bounded) coordinates.
template <class F>
OptimResult nelder_mead_bounded(F&& f, const std::vector<double>& x0, const BoxTransform& box,
                                const NelderMeadOptions& opts = {}) {
  auto g = [&](const std::vector<double>& z) { return f(box.to_bounded(z)); };
  OptimResult res = nelder_mead(g, box.to_unbounded(x0), opts);
  res.x = box.to_bounded(res.x);
  return res;
}

struct QuasiNewtonOptions {
  std::size_t max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double relative_step = 1e-6;  // central-difference step, relative to max(1, |z|)
};

/// BFGS with central-difference gradients and Armijo backtracking, run in
/// the sin^2-transformed coordinates of `box`.
template <class F>
OptimResult quasi_newton_bounded(F&& f, const std::vector<double>& x0, const BoxTransform& box,
                                 const QuasiNewtonOptions& opts = {}) {
  OptimResult res;
  const std::size_t n = x0.size();
  auto phi = [&](const std::vector<double>& z) {
    ++res.evaluations;
    const double v = f(box.to_bounded(z));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  auto gradient = [&](std::vector<double> z) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = opts.relative_step * std::max(1.0, std::abs(z[i]));
      const double zi = z[i];
      z[i] = zi + h;
      const double fp = phi(z);
      z[i] = zi - h;
      const double fm = phi(z);
      z[i] = zi;
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  std::vector<double> z = box.to_unbounded(x0);
  double fz = phi(z);
  if (!std::isfinite(fz)) {
    res.x = x0;
    res.value = fz;
    return res;
  }
  std::vector<double> grad = gradient(z);
  std::vector<double> H(n * n, 0.0);  // inverse Hessian approximation
  for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

  for (; res.iterations < opts.max_iterations; ++res.iterations) {
    double gnorm = 0.0;
    for (double gi : grad) gnorm = std::max(gnorm, std::abs(gi));
    if (!std::isfinite(gnorm)) break;
    if (gnorm < opts.gradient_tolerance) {
      res.converged = true;
      break;
    }
    std::vector<double> dir(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dir[i] -= H[i * n + j] * grad[j];
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += dir[i] * grad[i];
    if (slope >= 0.0) {  // not a descent direction: restart from steepest descent
      std::fill(H.begin(), H.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        H[i * n + i] = 1.0;
        dir[i] = -grad[i];
      }
      slope = -std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    }
    double step = 1.0;
    std::vector<double> znew(n);
    double fnew = fz;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) znew[i] = z[i] + step * dir[i];
      fnew = phi(znew);
      if (fnew <= fz + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    std::vector<double> gnew = gradient(znew);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = znew[i] - z[i];
      y[i] = gnew[i] - grad[i];
    }
    const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
    if (sy > 1e-12) {
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
      const double yHy = std::inner_product(y.begin(), y.end(), Hy.begin(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i * n + j] += ((sy + yHy) * s[i] * s[j]) / (sy * sy) - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
        }
      }
    }
    const double improvement = fz - fnew;
    z = std::move(znew);
    fz = fnew;
    grad = std::move(gnew);
    if (improvement < 1e-12 * (1.0 + std::abs(fz))) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  res.x = box.to_bounded(z);
  res.value = fz;
  return res;
}

}  // namespace betarc
