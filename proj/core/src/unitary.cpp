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

#include "osinv/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "osinv/error.hpp"
#include "osinv/parallel.hpp"

namespace osinv::unitary {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double circle_distance(double a, double b) {
  return std::abs(std::remainder(a - b, kTwoPi));
}

std::vector<double> gaps_of(const std::vector<double>& angles) {
  const std::size_t m = angles.size();
  std::vector<double> gaps(m);
  if (m == 1) {
    gaps[0] = kTwoPi;
    return gaps;
  }
  for (std::size_t i = 0; i + 1 < m; ++i) gaps[i] = angles[i + 1] - angles[i];
  gaps[m - 1] = kTwoPi + angles[0] - angles[m - 1];
  return gaps;
}

std::vector<double> rotate_seq(const std::vector<double>& seq, std::size_t k) {
  std::vector<double> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out[i] = seq[(i + k) % seq.size()];
  return out;
}

int cmp(double a, double b, double slack) {
  if (std::abs(a - b) <= slack) return 0;
  return a < b ? -1 : 1;
}

// Span residual helper for a fixed point set: columns (1, z, conj z).
linalg::SpanProjector degree_one_projector(const std::vector<Complex>& pts) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  Matrix b(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    b(i, 0) = 1.0;
    b(i, 1) = pts[static_cast<std::size_t>(i)];
    b(i, 2) = std::conj(pts[static_cast<std::size_t>(i)]);
  }
  return linalg::SpanProjector(b);
}

struct PreparedPair {
  std::vector<Complex> source;
  std::vector<Complex> target;
  linalg::SpanProjector source_span;
  linalg::SpanProjector target_span;
};

// Relative excess of each direction: residual / bound (pass iff <= 1).
std::pair<double, double> relative_residuals(const PreparedPair& p,
                                             const std::vector<int>& h,
                                             double span_tol, Vector& fwd,
                                             Vector& bwd) {
  const auto m = static_cast<Eigen::Index>(h.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = static_cast<std::size_t>(h[static_cast<std::size_t>(i)]);
    fwd(i) = p.target[j];
    bwd(static_cast<Eigen::Index>(j)) = p.source[static_cast<std::size_t>(i)];
  }
  const double rf = p.source_span.residual(fwd) / (span_tol * std::max(1.0, fwd.norm()));
  const double rb = p.target_span.residual(bwd) / (span_tol * std::max(1.0, bwd.norm()));
  return {rf, rb};
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Isomorphic: return "Isomorphic";
    case Verdict::NotIsomorphic: return "NotIsomorphic";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

const char* to_string(Method m) {
  return m == Method::Oracle ? "oracle" : "theorem-fast-path";
}

CircleSet CircleSet::from_angles(std::vector<double> angles, double tol) {
  if (angles.empty()) throw InvalidInput("CircleSet: empty point set");
  for (double& a : angles) {
    if (!std::isfinite(a)) throw InvalidInput("CircleSet: non-finite angle");
    a = wrap(a);
  }
  std::sort(angles.begin(), angles.end());
  std::vector<double> kept;
  for (double a : angles)
    if (kept.empty() || a - kept.back() > tol) kept.push_back(a);
  if (kept.size() > 1 && circle_distance(kept.back(), kept.front()) <= tol)
    kept.pop_back();
  CircleSet s;
  s.angles_ = std::move(kept);
  s.tol_ = tol;
  return s;
}

CircleSet CircleSet::from_points(const std::vector<Complex>& points, double tol) {
  std::vector<double> angles;
  angles.reserve(points.size());
  for (const auto& z : points) angles.push_back(std::arg(z));
  return from_angles(std::move(angles), tol);
}

std::vector<Complex> CircleSet::points() const {
  std::vector<Complex> out;
  out.reserve(angles_.size());
  for (double a : angles_) out.push_back(std::polar(1.0, a));
  return out;
}

Complex RigidMotion::apply(Complex z) const {
  return std::polar(1.0, rotation) * (reflect ? std::conj(z) : z);
}

double RigidMotion::apply_angle(double theta) const {
  return wrap(rotation + (reflect ? -theta : theta));
}

CircleSet spectrum(const Matrix& u, double tol) {
  linalg::require_valid(u, "spectrum");
  if (u.rows() != u.cols()) throw DimensionError("spectrum: matrix is not square");
  const Matrix id = Matrix::Identity(u.rows(), u.cols());
  const double defect = linalg::op_norm(u.adjoint() * u - id);
  if (defect > tol)
    throw NotUnitaryError("spectrum: matrix is not unitary", defect);
  const auto eig = linalg::eig_normal(u, std::max(tol, linalg::kDefaultTol));
  std::vector<Complex> pts;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const Complex lam = eig.eigenvalues(i);
    if (std::abs(std::abs(lam) - 1.0) > tol)
      throw NotUnitaryError("spectrum: eigenvalue off the unit circle",
                            std::abs(std::abs(lam) - 1.0));
    pts.push_back(lam / std::abs(lam));
  }
  return CircleSet::from_points(pts, tol);
}

std::size_t least_rotation(const std::vector<double>& seq, double slack) {
  const std::size_t n = seq.size();
  if (n <= 1) return 0;
  auto at = [&](std::size_t i) { return seq[i % n]; };
  std::vector<long> fail(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    long i = fail[j - k - 1];
    while (i != -1 && cmp(at(j), at(k + static_cast<std::size_t>(i) + 1), slack) != 0) {
      if (cmp(at(j), at(k + static_cast<std::size_t>(i) + 1), slack) < 0)
        k = j - static_cast<std::size_t>(i) - 1;
      i = fail[static_cast<std::size_t>(i)];
    }
    if (i == -1 && cmp(at(j), at(k), slack) != 0) {
      if (cmp(at(j), at(k), slack) < 0) k = j;
      fail[j - k] = -1;
    } else {
      fail[j - k] = i + 1;
    }
  }
  return k % n;
}

int compare_gaps(const std::vector<double>& a, const std::vector<double>& b,
                 double slack) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cmp(a[i], b[i], slack);
    if (c != 0) return c;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

bool same_necklace(const CanonicalNecklace& a, const CanonicalNecklace& b,
                   double slack) {
  return compare_gaps(a.gaps, b.gaps, slack) == 0;
}

CanonicalNecklace canonical_form(const CircleSet& s) {
  const std::vector<double> gaps = gaps_of(s.angles());
  std::vector<double> reversed(gaps.rbegin(), gaps.rend());
  auto plain = rotate_seq(gaps, least_rotation(gaps));
  auto mirrored = rotate_seq(reversed, least_rotation(reversed));
  if (compare_gaps(mirrored, plain) < 0) return {std::move(mirrored), true};
  return {std::move(plain), false};
}

double hausdorff_angle(const std::vector<double>& a, const std::vector<double>& b) {
  auto directed = [](const std::vector<double>& x, const std::vector<double>& y) {
    double worst = 0.0;
    for (double p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (double q : y) best = std::min(best, circle_distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

std::optional<RigidMotion> rigid_equivalent(const CircleSet& s, const CircleSet& t,
                                            double tol, double* residual) {
  if (s.size() != t.size() || s.size() == 0) return std::nullopt;
  const double anchor = s.angles().front();
  std::optional<RigidMotion> best;
  double best_res = std::numeric_limits<double>::infinity();
  std::vector<double> moved(t.size());
  for (bool reflect : {false, true}) {
    for (double tj : t.angles()) {
      RigidMotion g{wrap(reflect ? anchor + tj : anchor - tj), reflect};
      for (std::size_t i = 0; i < t.size(); ++i) moved[i] = g.apply_angle(t.angles()[i]);
      const double res = hausdorff_angle(moved, s.angles());
      if (res <= tol && res < best_res) {
        best_res = res;
        best = g;
      }
    }
  }
  if (best && residual) *residual = best_res;
  return best;
}

bool test_bijection(const std::vector<Complex>& source,
                    const std::vector<Complex>& target,
                    const std::vector<int>& bijection, double span_tol,
                    BijectionCertificate& out) {
  if (source.size() != target.size() || bijection.size() != source.size())
    throw DimensionError("test_bijection: size mismatch");
  PreparedPair p{source, target, degree_one_projector(source),
                 degree_one_projector(target)};
  const auto m = static_cast<Eigen::Index>(source.size());
  Vector fwd(m), bwd(m);
  const auto [rf, rb] = relative_residuals(p, bijection, span_tol, fwd, bwd);
  out.bijection = bijection;
  out.forward_coeffs = p.source_span.coefficients(fwd);
  out.backward_coeffs = p.target_span.coefficients(bwd);
  out.forward_residual = p.source_span.residual(fwd);
  out.backward_residual = p.target_span.residual(bwd);
  return rf <= 1.0 && rb <= 1.0;
}

long factorial(int m) {
  long f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

std::vector<int> nth_permutation(int m, long index) {
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> out;
  out.reserve(pool.size());
  for (int k = m; k >= 1; --k) {
    const long f = factorial(k - 1);
    const auto pick = static_cast<std::size_t>(index / f);
    index %= f;
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

namespace {

// Bijection induced by a rigid motion g with g(target) ~ source.
std::optional<std::vector<int>> motion_bijection(const CircleSet& source,
                                                 const CircleSet& target,
                                                 const RigidMotion& g) {
  const std::size_t m = source.size();
  std::vector<int> h(m, -1);
  std::vector<bool> used(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    const double moved = g.apply_angle(target.angles()[j]);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double d = circle_distance(moved, source.angles()[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (used[best]) return std::nullopt;
    used[best] = true;
    h[best] = static_cast<int>(j);
  }
  return h;
}

std::vector<std::vector<int>> rigid_candidates(const CircleSet& source,
                                               const CircleSet& target) {
  std::vector<std::vector<int>> out;
  const double anchor = source.angles().front();
  for (bool reflect : {false, true}) {
    for (double tj : target.angles()) {
      RigidMotion g{wrap(reflect ? anchor + tj : anchor - tj), reflect};
      auto h = motion_bijection(source, target, g);
      if (h && std::find(out.begin(), out.end(), *h) == out.end())
        out.push_back(std::move(*h));
    }
  }
  return out;
}

}  // namespace

CoisDecision cois_spectra_oracle(const CircleSet& su, const CircleSet& sv,
                                 const OracleOptions& opts) {
  CoisDecision d;
  d.method = Method::Oracle;
  d.source = su;
  d.target = sv;
  if (su.size() != sv.size()) {
    d.verdict = Verdict::NotIsomorphic;
    d.exhaustion = ExhaustionRecord{};
    d.note = "spectra have different cardinalities";
    return d;
  }
  const int m = static_cast<int>(su.size());
  if (m > opts.cap)
    throw CapacityError("cois_unitary_oracle: spectrum exceeds enumeration cap", m,
                        opts.cap);

  PreparedPair p{su.points(), sv.points(), {}, {}};
  p.source_span = degree_one_projector(p.source);
  p.target_span = degree_one_projector(p.target);

  const auto candidates = rigid_candidates(su, sv);
  const long perms = factorial(m);
  const std::size_t total = candidates.size() + static_cast<std::size_t>(perms);
  std::vector<double> fwd_res(static_cast<std::size_t>(perms), 0.0);
  std::vector<double> bwd_res(static_cast<std::size_t>(perms), 0.0);

  auto bijection_at = [&](std::size_t idx) {
    if (idx < candidates.size()) return candidates[idx];
    return nth_permutation(m, static_cast<long>(idx - candidates.size()));
  };

  const auto hit = find_first(total, opts.jobs, [&](std::size_t idx) {
    const auto h = bijection_at(idx);
    Vector fwd(m), bwd(m);
    const auto [rf, rb] = relative_residuals(p, h, opts.span_tol, fwd, bwd);
    if (idx >= candidates.size()) {
      fwd_res[idx - candidates.size()] = rf;
      bwd_res[idx - candidates.size()] = rb;
    }
    return rf <= 1.0 && rb <= 1.0;
  });

  if (hit) {
    BijectionCertificate cert;
    test_bijection(p.source, p.target, bijection_at(*hit), opts.span_tol, cert);
    d.verdict = Verdict::Isomorphic;
    d.bijection = std::move(cert);
    d.note = *hit < candidates.size() ? "rigid-motion candidate"
                                      : "permutation search";
    return d;
  }

  ExhaustionRecord rec;
  rec.tried = perms;
  rec.min_blocking = std::numeric_limits<double>::infinity();
  const bool store = perms <= kMaxStoredRecords;
  for (long k = 0; k < perms; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double blocking = std::max(fwd_res[ku], bwd_res[ku]);
    rec.min_blocking = std::min(rec.min_blocking, blocking);
    if (store) {
      // Residuals were stored relative to their bounds; report absolute ones.
      FailedAssignment f;
      f.bijection = nth_permutation(m, k);
      BijectionCertificate c;
      test_bijection(p.source, p.target, f.bijection, opts.span_tol, c);
      f.forward_residual = c.forward_residual;
      f.backward_residual = c.backward_residual;
      rec.failures.push_back(std::move(f));
    }
  }
  d.verdict = Verdict::NotIsomorphic;
  d.exhaustion = std::move(rec);
  d.note = "every bijection fails the span test";
  return d;
}

CoisDecision cois_unitary_oracle(const Matrix& u, const Matrix& v,
                                 const OracleOptions& opts) {
  return cois_spectra_oracle(spectrum(u, opts.tol), spectrum(v, opts.tol), opts);
}

CoisDecision cois_unitary_theorem(const Matrix& u, const Matrix& v, double tol) {
  CoisDecision d;
  d.method = Method::TheoremFastPath;
  d.source = spectrum(u, tol);
  d.target = spectrum(v, tol);
  const std::size_t m = d.source.size();
  const std::size_t mv = d.target.size();

  if (std::min(m, mv) <= 3) {
    if (m != mv) {
      d.verdict = Verdict::NotIsomorphic;
      d.note = "at most three spectral points: cardinalities differ";
      return d;
    }
    BijectionCertificate cert;
    std::vector<int> id(m);
    std::iota(id.begin(), id.end(), 0);
    if (!test_bijection(d.source.points(), d.target.points(), id,
                        linalg::kDefaultTol, cert))
      throw Error("cois_unitary_theorem: certificate for equal small spectra failed");
    d.verdict = Verdict::Isomorphic;
    d.bijection = std::move(cert);
    d.note = "at most three spectral points: cardinalities agree";
    return d;
  }

  double res = 0.0;
  auto g = rigid_equivalent(d.source, d.target, tol, &res);
  if (g) {
    d.verdict = Verdict::Isomorphic;
    d.motion = g;
    d.motion_residual = res;
    d.note = "spectra related by a rigid motion";
    return d;
  }
  if (std::max(m, mv) >= 5) {
    d.verdict = Verdict::NotIsomorphic;
    d.note = "no rigid motion relates the spectra";
    return d;
  }
  d.verdict = Verdict::Unknown;
  d.note = "four-point spectra without a rigid witness are not decided by the theorem";
  return d;
}

bool validate_unitary_image(Complex alpha, Complex beta, Complex gamma, double tol) {
  const double norm_sq = std::norm(alpha) + std::norm(beta) + std::norm(gamma);
  const Complex r2 = std::conj(alpha) * beta + alpha * std::conj(gamma);
  const Complex r3 = alpha * std::conj(beta) + std::conj(alpha) * gamma;
  const Complex r4 = std::conj(beta) * gamma;
  return std::abs(norm_sq - 1.0) <= tol && std::abs(r2) <= tol &&
         std::abs(r3) <= tol && std::abs(r4) <= tol;
}

FourPointReport four_point_obstruction(const Matrix& u, const Matrix& v,
                                       double tol) {
  const CircleSet su = spectrum(u, tol);
  const CircleSet sv = spectrum(v, tol);
  if (su.size() != 4 || sv.size() != 4)
    throw DimensionError("four_point_obstruction: both spectra must have 4 points");
  const auto a = su.points();
  const auto w = sv.points();
  FourPointReport rep;
  rep.min_modulus = std::numeric_limits<double>::infinity();
  for (long k = 0; k < 24; ++k) {
    auto perm = nth_permutation(4, k);
    Eigen::Matrix4cd mat;
    for (int r = 0; r < 4; ++r) {
      mat(r, 0) = a[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])];
      mat(r, 1) = 1.0;
      mat(r, 2) = w[static_cast<std::size_t>(r)];
      mat(r, 3) = std::conj(w[static_cast<std::size_t>(r)]);
    }
    const Complex det = mat.determinant();
    rep.min_modulus = std::min(rep.min_modulus, std::abs(det));
    rep.assignments.push_back(std::move(perm));
    rep.determinants.push_back(det);
  }
  rep.all_nonzero = rep.min_modulus > linalg::kDefaultTol;
  return rep;
}

}  // namespace osinv::unitary
