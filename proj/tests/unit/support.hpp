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

#include <complex>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "osinv/linalg.hpp"

namespace osinv::testing {

using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

inline Matrix diag(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (const auto& z : d) {
    m(i, i) = z;
    ++i;
  }
  return m;
}

inline Matrix diag(const std::vector<Complex>& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

inline Matrix w_matrix(double t) {
  Matrix w = Matrix::Zero(3, 3);
  w(1, 0) = 1.0;
  w(2, 1) = t;
  return w;
}

// Largest singular value by power iteration on A^*A.
inline double power_norm(const Matrix& a, int iters = 2000) {
  const Matrix g = a.adjoint() * a;
  Vector v = Vector::Ones(a.cols());
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vector w = g * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lambda = nw / v.norm();
    v = w / nw;
  }
  return std::sqrt(lambda);
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

inline Complex unit(double theta) { return std::polar(1.0, theta); }

}  // namespace osinv::testing
