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

// Classification of operator systems span{I, U, U*} generated by a single
// unitary with finite spectrum: spectra as point sets on the circle, their
// canonical form under rotations and reflections, the cardinality/rigid-motion
// decision, and an exhaustive bijection oracle over the spectra.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osinv/linalg.hpp"

namespace osinv::unitary {

using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

/// Default angular tolerance for deduplication and rigid matching.
inline constexpr double kAngleTol = 1e-8;
/// Slack used when comparing gap sequences entrywise.
inline constexpr double kGapSlack = 1e-9;
inline constexpr int kDefaultOracleCap = 9;
/// Exhaustion records are kept per bijection up to this many bijections.
inline constexpr long kMaxStoredRecords = 5040;

/// Finite subset of the unit circle as sorted angles in [0, 2pi).
class CircleSet {
 public:
  /// Normalizes into [0, 2pi), sorts and merges points closer than tol
  /// (circular distance, wrap-around included). Throws InvalidInput if empty.
  static CircleSet from_angles(std::vector<double> angles, double tol = kAngleTol);
  static CircleSet from_points(const std::vector<Complex>& points,
                               double tol = kAngleTol);

  const std::vector<double>& angles() const { return angles_; }
  double tol() const { return tol_; }
  std::size_t size() const { return angles_.size(); }
  std::vector<Complex> points() const;

 private:
  std::vector<double> angles_;
  double tol_ = kAngleTol;
};

struct CanonicalNecklace {
  std::vector<double> gaps;  // sums to 2pi
  bool reflected = false;
};

/// z -> e^{i rotation} z, or z -> e^{i rotation} conj(z) when reflect is set.
struct RigidMotion {
  double rotation = 0.0;
  bool reflect = false;

  Complex apply(Complex z) const;
  double apply_angle(double theta) const;
};

enum class Verdict { Isomorphic, NotIsomorphic, Unknown };
enum class Method { TheoremFastPath, Oracle };

const char* to_string(Verdict v);
const char* to_string(Method m);

/// bijection[i] = index in the target spectrum of the image of source point i.
struct BijectionCertificate {
  std::vector<int> bijection;
  Vector forward_coeffs;   // target values as (1, z, conj z) combination on the source
  Vector backward_coeffs;  // source values as (1, w, conj w) combination on the target
  double forward_residual = 0.0;
  double backward_residual = 0.0;
};

struct FailedAssignment {
  std::vector<int> bijection;
  double forward_residual = 0.0;
  double backward_residual = 0.0;
};

struct ExhaustionRecord {
  long tried = 0;
  /// Per-bijection residuals; empty when the count exceeds kMaxStoredRecords.
  std::vector<FailedAssignment> failures;
  /// Smallest over bijections of the larger relative residual excess.
  double min_blocking = 0.0;
};

struct CoisDecision {
  Verdict verdict = Verdict::Unknown;
  Method method = Method::TheoremFastPath;
  CircleSet source;  // sigma(U)
  CircleSet target;  // sigma(V)
  std::optional<RigidMotion> motion;  // maps target onto source
  double motion_residual = 0.0;
  std::optional<BijectionCertificate> bijection;
  std::optional<ExhaustionRecord> exhaustion;
  std::string note;
};

/// Deduplicated spectrum of a unitary; throws NotUnitaryError with the defect
/// ||U*U - I|| when it exceeds tol.
CircleSet spectrum(const Matrix& u, double tol = kAngleTol);

/// Circular gap sequence rotated to its lexicographic minimum, compared with
/// the minimum of the reversed sequence; ties keep the unreflected form.
CanonicalNecklace canonical_form(const CircleSet& s);

/// Index of the lexicographically least rotation (Booth), entries equal when
/// within `slack`.
std::size_t least_rotation(const std::vector<double>& seq, double slack = kGapSlack);

/// Compares two gap sequences entrywise with slack: -1, 0 or 1.
int compare_gaps(const std::vector<double>& a, const std::vector<double>& b,
                 double slack = kGapSlack);

bool same_necklace(const CanonicalNecklace& a, const CanonicalNecklace& b,
                   double slack = kGapSlack);

/// Hausdorff distance (in angle) between two circle sets.
double hausdorff_angle(const std::vector<double>& a, const std::vector<double>& b);

/// A motion g with g(t) = s, chosen among the 2|t| motions sending a point of
/// t (reflected or not) to the first point of s; smallest residual wins.
std::optional<RigidMotion> rigid_equivalent(const CircleSet& s, const CircleSet& t,
                                            double tol = kAngleTol,
                                            double* residual = nullptr);

/// Decision from the cardinality rule and rigid equivalence. Four-point pairs
/// without a rigid witness are Unknown.
CoisDecision cois_unitary_theorem(const Matrix& u, const Matrix& v,
                                  double tol = kAngleTol);

struct OracleOptions {
  double tol = kAngleTol;
  /// Relative residual threshold of the span tests.
  double span_tol = linalg::kDefaultTol;
  int cap = kDefaultOracleCap;
  int jobs = 1;
};

/// Exhaustive search for a bijection h of spectra with h in span{1, z, conj z}
/// and h^{-1} in span{1, w, conj w}. Rigid-motion candidates are tried first,
/// then all permutations in lexicographic order; the first hit is returned.
CoisDecision cois_unitary_oracle(const Matrix& u, const Matrix& v,
                                 const OracleOptions& opts = {});
CoisDecision cois_spectra_oracle(const CircleSet& su, const CircleSet& sv,
                                 const OracleOptions& opts = {});

/// Span test of one bijection between circle sets; fills residuals and
/// coefficients. Returns true when both directions pass.
bool test_bijection(const std::vector<Complex>& source,
                    const std::vector<Complex>& target,
                    const std::vector<int>& bijection, double span_tol,
                    BijectionCertificate& out);

/// Relations forced on phi(U) = alpha I + beta V + gamma V* when V has at
/// least five spectral points.
bool validate_unitary_image(Complex alpha, Complex beta, Complex gamma,
                            double tol = linalg::kDefaultTol);

struct FourPointReport {
  std::vector<std::vector<int>> assignments;  // permutations of source indices
  std::vector<Complex> determinants;
  double min_modulus = 0.0;
  /// Every determinant is nonzero: U's spectrum cannot be placed in
  /// span{1, w, conj w} on sigma(V) by any bijection.
  bool all_nonzero = false;
};

/// For each assignment (a, b, c, d) of sigma(U) to the points of sigma(V),
/// det[assignment | 1 | sigma(V) | conj sigma(V)].
FourPointReport four_point_obstruction(const Matrix& u, const Matrix& v,
                                       double tol = kAngleTol);

/// Permutation of {0..m-1} with lexicographic rank `index`.
std::vector<int> nth_permutation(int m, long index);
long factorial(int m);

}  // namespace osinv::unitary
