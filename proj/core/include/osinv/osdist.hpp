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

// Level-n distances between operator systems of equal dimension, estimated
// numerically, plus the W_t families and their exact classification.
//
// All distance values here are best-found values of nonconvex searches. They
// carry their seed and restart count and are never used as certified bounds.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "osinv/opsys.hpp"
#include "osinv/unitary.hpp"

namespace osinv::osdist {

using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;
using opsys::AmplifiedElement;
using opsys::OperatorSystemSpan;

/// Coordinates of a linear map u: X -> Y, u(sum c_j x_j) = sum (M c)_i y_i.
struct LinearMapCoords {
  Matrix matrix;
  /// 2-norm condition number of `matrix`.
  double condition = 0.0;

  static LinearMapCoords from(Matrix m);
  static LinearMapCoords identity(Eigen::Index n);
};

/// Inner ascent budget for one norm estimate.
struct InnerBudget {
  int iterations = 200;
  int starts = 16;
};

struct NormEstimate {
  double value = 0.0;
  AmplifiedElement argmax;  // normalized so that its X-norm is 1
};

/// Lower estimate of ||id_{M_n} (x) u|| by ascent on ||(id (x) u)A||_Y / ||A||_X
/// from the unit element, the supplied warm starts and seeded random starts.
/// Each start is first climbed on the Schatten-p ratio for growing p, then on
/// the exact ratio; the value returned is always attained at `argmax`.
NormEstimate estimate_map_norm(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                               const Matrix& u, int level, const InnerBudget& budget,
                               std::uint64_t seed,
                               const std::vector<AmplifiedElement>& warm = {});

double amplified_map_norm(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                          const LinearMapCoords& u, int level,
                          const InnerBudget& budget = {}, std::uint64_t seed = 0);

/// Applies u coefficientwise.
AmplifiedElement apply_map(const Matrix& u, const AmplifiedElement& a);

struct SearchOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
  int jobs = 1;
  /// Simplex evaluations per round of the active-set search.
  int max_evals = 1500;
  /// Random test elements seeding each active set.
  int probes = 4;
  /// Active-set rounds per restart; each round adds the maximizers of a full
  /// inner ascent (budget `round_inner`) at the current map.
  int rounds = 4;
  InnerBudget round_inner{60, 2};
  /// Budget for the value reported for each restart's best map.
  InnerBudget final_inner{};
  /// A restart reaching this objective stops later restarts from counting.
  double zero_threshold = 1e-10;
};

/// The three terms of the level-n objective for one map.
struct ObjectiveTerms {
  double unit_defect = 0.0;  // ||u(e_X) - e_Y||
  double log_forward = 0.0;  // log ||id (x) u||
  double log_inverse = 0.0;  // log ||id (x) u^{-1}||
  double value() const;
};

ObjectiveTerms evaluate_objective(const OperatorSystemSpan& x,
                                  const OperatorSystemSpan& y, const Matrix& u,
                                  int level, const InnerBudget& budget,
                                  std::uint64_t seed);

struct LevelEstimate {
  int level = 1;
  double value = 0.0;  // best-found objective
  ObjectiveTerms terms;
  LinearMapCoords best_map;
  int restarts_used = 0;  // restarts that count toward the minimum
  int best_restart = 0;
  /// Objective of best_map at levels 1..n_max (running maximum over levels,
  /// each level warm-started from the previous argmax).
  std::vector<double> profile;
  bool converged = false;
};

/// d_n best-found estimate. Restarts come in pairs 2b, 2b + 1 sharing a start
/// and inner seed: the even one searches maps X -> Y, the odd one searches
/// Y -> X and reports the inverse. Pair 0 starts at the identity coordinates,
/// pair 1 at a map matching trace moments of self-adjoint frames, later pairs
/// at seeded random unital *-maps. Throws NotComparableError when
/// dim X != dim Y.
LevelEstimate dn_estimate(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                          int level, const SearchOptions& opts = {});

struct DistanceReport {
  std::vector<LevelEstimate> per_level;
  double weighted = 0.0;  // sum_{n <= n_max} 2^{-n} d_n
  std::uint64_t seed = 0;
  int restarts = 0;
  bool converged = true;
};

/// Levels 1..n_max. At level n + 1, even restarts r start from the best
/// level-n map among restarts 0..r and odd restarts reuse the level-1 starts,
/// so enlarging the restart set never worsens any level.
DistanceReport dgh_weighted(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                            int n_max, const SearchOptions& opts = {});

enum class WtVariant { ThreeByThree, TwoByTwo };

struct WtParams {
  double t = 1.0;
  WtVariant variant = WtVariant::ThreeByThree;
};

/// [[0,0,0],[1,0,0],[0,t,0]] or [[1,0],[t,0]]; throws InvalidInput unless
/// 0 < t <= 1.
Matrix wt_matrix(const WtParams& p);
OperatorSystemSpan wt_system(const WtParams& p);

/// Dimension of {Z : ZW = WZ, ZW* = W*Z}.
int commutant_dimension(const Matrix& w, double tol = linalg::kDefaultTol);

struct WtWitness {
  Matrix unitary;
  Complex alpha, beta, gamma;
  /// ||U W_t U* - (alpha I + beta W_s + gamma W_s*)||
  double residual = 0.0;
};

struct WtDecision {
  unitary::Verdict verdict = unitary::Verdict::Unknown;
  unitary::Method method = unitary::Method::TheoremFastPath;
  double t = 0.0, s = 0.0;
  WtVariant variant = WtVariant::ThreeByThree;
  /// Derivation record for the 3x3 family.
  std::vector<std::string> steps;
  double trace_w = 0.0;            // tau(W_t)
  double trace_w_sq = 0.0;         // tau(W_t^2)
  double cross_trace = 0.0;        // tau(W_s W_s* + W_s* W_s): the beta*gamma factor
  std::vector<double> singular_t;  // singular values of W_t
  std::vector<double> singular_s;
  std::optional<WtWitness> witness;
  /// 2x2: smallest residual over all restarts; restarts and seed used.
  double min_residual = 0.0;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::string note;
};

struct WtOracleOptions {
  int restarts = 128;
  std::uint64_t seed = 0;
  int jobs = 1;
  /// Residual at or below which a conjugation witness is accepted.
  double accept_tol = 1e-7;
};

WtDecision wt_classify(double t, double s, WtVariant variant, double tol = 1e-12,
                       const WtOracleOptions& oracle = {});

/// (tau(g), tau(g^2)) with tau the normalized trace.
std::pair<Complex, Complex> trace_invariants(const OperatorSystemSpan& x,
                                             const Matrix& g);

}  // namespace osinv::osdist
