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

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace osinv::optimize {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadOptions {
  int max_evals = 2000;
  double initial_step = 0.1;
  /// Stop when the simplex spread in f and in x both fall below these.
  double f_tol = 1e-14;
  double x_tol = 1e-12;
  /// Number of times the simplex is rebuilt around the incumbent.
  int reinits = 3;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Adaptive Nelder-Mead (dimension-dependent coefficients). After each
/// convergence the simplex is rebuilt around the incumbent with half the
/// previous step, up to `reinits` times or until the budget runs out.
MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                           const NelderMeadOptions& opts = {});

struct BfgsOptions {
  int max_iters = 200;
  /// Central-difference step of the numerical gradient.
  double grad_step = 1e-6;
  /// Stop when the gradient infinity norm falls below this.
  double g_tol = 1e-9;
};

/// Quasi-Newton descent with a central-difference gradient and Armijo
/// backtracking. Meant for smooth objectives of a few dozen variables.
MinimizeResult bfgs(const Objective& f, const Eigen::VectorXd& x0,
                    const BfgsOptions& opts = {});

using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Same with an analytic gradient.
MinimizeResult bfgs(const Objective& f, const Gradient& grad, const Eigen::VectorXd& x0,
                    const BfgsOptions& opts = {});

}  // namespace osinv::optimize
