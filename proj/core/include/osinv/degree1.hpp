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

// Degree-1 maps between finite subsets of C^n and the decision whether two
// such sets are degree-1 homeomorphic, computed both from the monomial span
// {z_i conj(z_j)} and through the operator system of the coordinate
// multiplication operators.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osinv/linalg.hpp"
#include "osinv/opsys.hpp"

namespace osinv::degree1 {

using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

inline constexpr double kDefaultTol = 1e-9;

/// m distinct points of C^n.
class PointSet {
 public:
  /// Throws InvalidInput on empty input, wrong coordinate counts or two points
  /// within `tol` of each other.
  PointSet(int ambient, std::vector<Vector> points, double tol = kDefaultTol);

  int ambient() const { return ambient_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vector>& points() const { return points_; }
  const Vector& operator[](std::size_t i) const { return points_[i]; }
  double tol() const { return tol_; }

  /// Points of C (n = 1) from complex scalars.
  static PointSet from_scalars(const std::vector<Complex>& zs,
                               double tol = kDefaultTol);

 private:
  int ambient_;
  std::vector<Vector> points_;
  double tol_;
};

/// Coefficients beta_ij^(k), 0 <= i, j <= n, 1 <= k <= n, z_0 = 1:
/// f_k(z) = sum_ij beta_ij^(k) z_i conj(z_j). Stored per output coordinate in
/// (i, j) lexicographic order, matching monomial_matrix columns.
struct DegreeOneMap {
  int ambient = 1;
  std::vector<Vector> coeffs;  // coeffs[k - 1] has (n + 1)^2 entries

  Complex coefficient(int k, int i, int j) const;
  /// n = 1 names: f(z) = alpha + beta z + gamma conj(z) + delta z conj(z).
  Complex alpha() const { return coefficient(1, 0, 0); }
  Complex beta() const { return coefficient(1, 1, 0); }
  Complex gamma() const { return coefficient(1, 0, 1); }
  Complex delta() const { return coefficient(1, 1, 1); }

  Vector evaluate(const Vector& z) const;
};

struct Deg1Witness {
  std::vector<int> bijection;  // point i of D goes to point bijection[i] of E
  DegreeOneMap forward;
  DegreeOneMap backward;
  double forward_residual = 0.0;   // max replay error on D
  double backward_residual = 0.0;  // max replay error on E
};

struct Deg1Decision {
  bool homeomorphic = false;
  std::optional<Deg1Witness> witness;
  long tried = 0;
  std::string note;
};

struct Deg1Options {
  double tol = kDefaultTol;
  /// Bijection cap; 0 selects the default (8 for n = 1, 6 otherwise).
  int cap = 0;
  int jobs = 1;
};

int default_cap(int ambient);

/// Row r evaluates the monomials z_i conj(z_j) (z_0 = 1), columns in (i, j)
/// lexicographic order, at point r.
Matrix monomial_matrix(const PointSet& d);

/// Present iff every coordinate of `values` and every product
/// values_k conj(values_l) lies in the monomial column space of D; returns the
/// least-squares coefficients of the coordinates.
std::optional<DegreeOneMap> is_degree_one_assignment(const PointSet& d,
                                                     const std::vector<Vector>& values,
                                                     double tol = kDefaultTol);

/// Exhaustive bijection search; candidates are ordered by how well their
/// normalized pairwise-distance profiles agree (ties by lexicographic rank).
Deg1Decision degree_one_homeomorphic(const PointSet& d, const PointSet& e,
                                     const Deg1Options& opts = {});

/// build_system over V_k = diag(k-th coordinates) and V_i V_j^*.
opsys::OperatorSystemSpan normal_system(const PointSet& d);

/// Same decision computed through the function spans of normal_system(D) and
/// normal_system(E), enumerating bijections in plain lexicographic order.
Deg1Decision deg1_via_opsys(const PointSet& d, const PointSet& e,
                            const Deg1Options& opts = {});

/// Max over points of ||map(D_i) - E_{bijection[i]}||.
double replay_error(const DegreeOneMap& map, const PointSet& from,
                    const PointSet& to, const std::vector<int>& bijection);

std::vector<int> inverse_permutation(const std::vector<int>& p);

}  // namespace osinv::degree1
