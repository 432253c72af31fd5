// Copyright 2026 The osinv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "osinv/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace osinv::optimize {

namespace {

double safe(double v) {
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

struct Simplex {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> f;
};

// One Nelder-Mead run from `start`; returns evaluations used.
int run_once(const Objective& f, const Eigen::VectorXd& start, double step,
             int budget, const NelderMeadOptions& opts, Eigen::VectorXd& best_x,
             double& best_f, bool& converged) {
  const auto d = start.size();
  const double dd = static_cast<double>(d);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dd;
  const double gamma = 0.75 - 1.0 / (2.0 * dd);
  const double delta = 1.0 - 1.0 / dd;

  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& p) {
    ++evals;
    return safe(f(p));
  };

  Simplex s;
  s.x.push_back(start);
  s.f.push_back(eval(start));
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXd p = start;
    p(i) += step;
    s.x.push_back(p);
    s.f.push_back(eval(p));
  }
  std::vector<std::size_t> idx(s.x.size());
  converged = false;
  while (evals < budget) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
    const std::size_t lo = idx.front(), hi = idx.back(), second = idx[idx.size() - 2];

    double x_spread = 0.0;
    for (std::size_t k = 1; k < idx.size(); ++k)
      x_spread = std::max(x_spread, (s.x[idx[k]] - s.x[lo]).lpNorm<Eigen::Infinity>());
    const double f_spread = s.f[hi] - s.f[lo];
    if ((std::isfinite(f_spread) && f_spread <= opts.f_tol && x_spread <= opts.x_tol) ||
        x_spread <= opts.x_tol * 1e-2) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) centroid += s.x[idx[k]];
    centroid /= dd;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - s.x[hi]);
    const double fr = eval(xr);
    if (fr < s.f[lo]) {
      const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        s.x[hi] = xe;
        s.f[hi] = fe;
      } else {
        s.x[hi] = xr;
        s.f[hi] = fr;
      }
      continue;
    }
    if (fr < s.f[second]) {
      s.x[hi] = xr;
      s.f[hi] = fr;
      continue;
    }
    const bool outside = fr < s.f[hi];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + gamma * (xr - centroid))
                                       : Eigen::VectorXd(centroid - gamma * (centroid - s.x[hi]));
    const double fc = eval(xc);
    if (fc < (outside ? fr : s.f[hi])) {
      s.x[hi] = xc;
      s.f[hi] = fc;
      continue;
    }
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const std::size_t j = idx[k];
      s.x[j] = s.x[lo] + delta * (s.x[j] - s.x[lo]);
      s.f[j] = eval(s.x[j]);
    }
  }
  const auto it = std::min_element(s.f.begin(), s.f.end());
  best_f = *it;
  best_x = s.x[static_cast<std::size_t>(it - s.f.begin())];
  return evals;
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                           const NelderMeadOptions& opts) {
  MinimizeResult res;
  res.x = x0;
  res.value = std::numeric_limits<double>::infinity();
  if (x0.size() == 0) {
    res.value = safe(f(x0));
    res.evals = 1;
    res.converged = true;
    return res;
  }
  double step = opts.initial_step;
  Eigen::VectorXd start = x0;
  for (int round = 0; round <= opts.reinits && res.evals < opts.max_evals; ++round) {
    Eigen::VectorXd bx;
    double bf = 0.0;
    bool conv = false;
    res.evals += run_once(f, start, step, opts.max_evals - res.evals, opts, bx, bf, conv);
    const bool improved = bf < res.value;
    if (improved) {
      res.value = bf;
      res.x = bx;
    }
    res.converged = conv;
    if (!improved && round > 0) break;
    start = res.x;
    step *= 0.5;
  }
  return res;
}

MinimizeResult bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& opts) {
  int grad_evals = 0;
  auto numeric = [&](const Eigen::VectorXd& x) {
    const auto d = x.size();
    Eigen::VectorXd g(d);
    Eigen::VectorXd p = x;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double h = opts.grad_step * std::max(1.0, std::abs(x(i)));
      p(i) = x(i) + h;
      const double fp = safe(f(p));
      p(i) = x(i) - h;
      const double fm = safe(f(p));
      p(i) = x(i);
      g(i) = (fp - fm) / (2.0 * h);
    }
    grad_evals += static_cast<int>(2 * d);
    return g;
  };
  MinimizeResult res = bfgs(f, numeric, x0, opts);
  res.evals += grad_evals;
  return res;
}

MinimizeResult bfgs(const Objective& f, const Gradient& gradient, const Eigen::VectorXd& x0,
                    const BfgsOptions& opts) {
  MinimizeResult res;
  res.x = x0;
  res.value = safe(f(x0));
  res.evals = 1;
  const auto d = x0.size();
  if (d == 0 || !std::isfinite(res.value)) return res;
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd g = gradient(res.x);
  for (int it = 0; it < opts.max_iters; ++it) {
    if (!g.allFinite()) break;
    if (g.lpNorm<Eigen::Infinity>() <= opts.g_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    Eigen::VectorXd next;
    double fn = 0.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k) {
      next = res.x + step * dir;
      fn = safe(f(next));
      ++res.evals;
      if (fn <= res.value + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      res.converged = true;
      break;
    }
    const Eigen::VectorXd gn = gradient(next);
    const Eigen::VectorXd s = next - res.x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    res.x = next;
    res.value = fn;
    g = gn;
  }
  return res;
}

}  // namespace osinv::optimize
