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

// Concrete operator systems: self-adjoint unital spans of k x k matrices.

#pragma once

#include <string>
#include <vector>

#include "osinv/linalg.hpp"

namespace osinv::opsys {

using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

/// A self-adjoint unital span of k x k matrices with a fixed basis. Build it
/// with build_system() or from_basis(); both establish the invariants.
struct OperatorSystemSpan {
  Eigen::Index ambient_dim = 0;
  std::vector<Matrix> basis;
  Vector unit_coeffs;  // sum_j unit_coeffs[j] * basis[j] == I

  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis.size()); }
  /// sum_m coeffs[m] * basis[m]
  Matrix element(const Vector& coeffs) const;
  /// Coordinates of x in the basis; throws InvalidInput if x is not in the span.
  Vector coordinates(const Matrix& x, double tol = linalg::kDefaultTol) const;
  std::vector<Vector> vectorized() const;
};

/// An n x n matrix over the system, stored row-major as coefficient vectors.
struct AmplifiedElement {
  int level = 1;
  std::vector<Vector> coeffs;  // level * level entries, each of length N

  AmplifiedElement() = default;
  AmplifiedElement(int n, Eigen::Index dim);
  Vector& at(int i, int j) { return coeffs[static_cast<std::size_t>(i * level + j)]; }
  const Vector& at(int i, int j) const {
    return coeffs[static_cast<std::size_t>(i * level + j)];
  }
};

/// Unit ball of a dual space given as the absolutely convex hull of finitely
/// many functionals; phi(x) = sum_j phi_j x_j.
struct PolyhedralDualBall {
  Eigen::Index dim = 0;
  std::vector<Vector> functionals;
};

struct SystemCheck {
  bool ok = false;
  /// Empty when ok; otherwise "identity", "adjoint" or "independence".
  std::string failed;
  std::string detail;
  /// Smallest singular value of the stacked tuple over the largest; reported
  /// only, no decision depends on it.
  double separation = 0.0;
};

/// Greedy basis of span{I} + span{g, g*}: I first when it is in the span,
/// then each generator followed by its adjoint, dropping dependent entries.
OperatorSystemSpan build_system(const std::vector<Matrix>& generators,
                                bool include_identity = true,
                                double tol = linalg::kDefaultTol);

/// Validates an explicit basis (square, equal sizes, independent,
/// self-adjoint span containing I) and fills in the unit coefficients.
OperatorSystemSpan from_basis(std::vector<Matrix> basis,
                              double tol = linalg::kDefaultTol);

SystemCheck is_operator_system(const std::vector<Matrix>& tuple,
                               double tol = linalg::kDefaultTol);

/// Minimum-norm coefficients reproducing I; throws NoUnitError.
Vector find_unit_coeffs(const std::vector<Matrix>& basis,
                        double tol = linalg::kDefaultTol);

/// The nk x nk matrix sum_ij E_ij (x) (sum_m c_ijm b_m).
Matrix assemble(const OperatorSystemSpan& x, const AmplifiedElement& a);

double amplified_norm(const OperatorSystemSpan& x, const AmplifiedElement& a);

/// I_n (x) e_X.
AmplifiedElement unit_element(const OperatorSystemSpan& x, int level);

/// Norm of [x_ij] in the minimal quantization: the largest op_norm of the
/// scalar matrix [phi(x_ij)] over the listed functionals. `entries` is
/// row-major, n * n vectors of length ball.dim.
double min_os_norm(const PolyhedralDualBall& ball,
                   const std::vector<Vector>& entries);

}  // namespace osinv::opsys
