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

// Dense complex linear algebra shared by every other module. Matrices are
// Eigen column-major complex matrices; vectorization is column-major too.

#pragma once

#include <complex>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace osinv::linalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Default relative tolerance for rank, membership and residual tests.
inline constexpr double kDefaultTol = 1e-9;

/// Throws DimensionError on empty input and InvalidInput on NaN/Inf entries.
void require_valid(const Matrix& a, const char* what);

/// Largest singular value.
double op_norm(const Matrix& a);

/// Top singular triplet (sigma, left, right) with a = sigma * left * right^*
/// on the dominant direction.
struct SingularTriplet {
  double value = 0.0;
  Vector left;
  Vector right;
};
SingularTriplet top_singular(const Matrix& a);

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Matrix& a);

struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;  // unitary, columns are eigenvectors
};

/// Eigendecomposition of a normal matrix through a complex Schur form.
/// Throws NotNormalError when ||AA* - A*A|| > tol ||A||^2 or when the
/// triangular factor keeps an off-diagonal defect above tol ||A||.
SpectralDecomposition eig_normal(const Matrix& a, double tol = kDefaultTol);

/// Minimum-norm least-squares coefficients of v in span(basis), returned only
/// if the residual is at most tol * max(1, ||v||).
std::optional<Vector> span_membership(const Vector& v,
                                      std::span<const Vector> basis,
                                      double tol = kDefaultTol);

/// Number of singular values of the stacked vectors above tol * sigma_max.
int gram_rank(std::span<const Vector> vectors, double tol = kDefaultTol);

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-major flattening.
Vector vec(const Matrix& a);

/// Orthogonal projector-based residual operator for a fixed basis. Built once,
/// queried many times (bijection searches solve thousands of systems against
/// the same span).
class SpanProjector {
 public:
  SpanProjector() = default;
  /// Columns of `basis` span the subspace.
  explicit SpanProjector(const Matrix& basis);

  /// ||(I - P) v||.
  double residual(const Vector& v) const;
  /// Minimum-norm least-squares coefficients.
  Vector coefficients(const Vector& v) const;
  int rank() const { return rank_; }
  Eigen::Index length() const { return length_; }

 private:
  Matrix range_;      // orthonormal basis of the column space (length x rank)
  Matrix pinv_;       // pseudo-inverse of the basis matrix
  int rank_ = 0;
  Eigen::Index length_ = 0;
};

/// Haar-ish random unitary: QR of a complex Gaussian matrix with phases fixed.
Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n);

/// Complex Gaussian matrix with unit-variance entries.
Matrix random_gaussian(std::mt19937_64& rng, Eigen::Index rows,
                       Eigen::Index cols);

}  // namespace osinv::linalg
