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

#include "osinv/osdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "osinv/error.hpp"
#include "osinv/optimize.hpp"
#include "osinv/parallel.hpp"
#include "osinv/random.hpp"

namespace osinv::osdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxCondition = 1e12;

// Flat coefficient layout: ((i * n + j) * N + m).
using Flat = Vector;

Flat flatten(const AmplifiedElement& a) {
  const auto dim = a.coeffs.empty() ? 0 : a.coeffs.front().size();
  Flat out(static_cast<Eigen::Index>(a.coeffs.size()) * dim);
  for (std::size_t e = 0; e < a.coeffs.size(); ++e)
    out.segment(static_cast<Eigen::Index>(e) * dim, dim) = a.coeffs[e];
  return out;
}

AmplifiedElement unflatten(const Flat& f, int level, Eigen::Index dim) {
  AmplifiedElement a(level, dim);
  for (std::size_t e = 0; e < a.coeffs.size(); ++e)
    a.coeffs[e] = f.segment(static_cast<Eigen::Index>(e) * dim, dim);
  return a;
}

Matrix assemble_flat(const OperatorSystemSpan& x, const Flat& c, int n) {
  const Eigen::Index k = x.ambient_dim;
  const Eigen::Index dim = x.dim();
  Matrix out = Matrix::Zero(n * k, n * k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto blk = out.block(i * k, j * k, k, k);
      const Eigen::Index base = (static_cast<Eigen::Index>(i) * n + j) * dim;
      for (Eigen::Index m = 0; m < dim; ++m)
        blk += c(base + m) * x.basis[static_cast<std::size_t>(m)];
    }
  return out;
}

Flat apply_flat(const Matrix& u, const Flat& c, int n) {
  const Eigen::Index dim = u.cols();
  Flat out(static_cast<Eigen::Index>(n) * n * u.rows());
  for (Eigen::Index e = 0; e < static_cast<Eigen::Index>(n) * n; ++e)
    out.segment(e * u.rows(), u.rows()) = u * c.segment(e * dim, dim);
  return out;
}

double norm_of(const OperatorSystemSpan& x, const Flat& c, int n) {
  return linalg::op_norm(assemble_flat(x, c, n));
}

// Norm and ascent direction (d sigma = Re <direction, dc>).
double norm_with_direction(const OperatorSystemSpan& x, const Flat& c, int n,
                           Flat& direction) {
  const auto top = linalg::top_singular(assemble_flat(x, c, n));
  const Eigen::Index k = x.ambient_dim;
  const Eigen::Index dim = x.dim();
  direction.resize(c.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto p = top.left.segment(i * k, k);
      const auto q = top.right.segment(j * k, k);
      const Eigen::Index base = (static_cast<Eigen::Index>(i) * n + j) * dim;
      for (Eigen::Index m = 0; m < dim; ++m) {
        const Complex w = p.dot(x.basis[static_cast<std::size_t>(m)] * q);
        direction(base + m) = std::conj(w);
      }
    }
  return top.value;
}

// Schatten p-norm of the assembled matrix A, an upper bound of the operator
// norm within a factor size^(1/p), and its gradient A V diag((s_i/|A|_p)^(p-2)) V* / |A|_p
// with A*A = V diag(s_i^2) V*.
double schatten_with_direction(const OperatorSystemSpan& x, const Flat& c, int n, double p,
                               Flat& direction) {
  const Matrix a = assemble_flat(x, c, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.adjoint() * a);
  const Eigen::VectorXd sv = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double top = sv.maxCoeff();
  direction = Flat::Zero(c.size());
  if (top == 0.0) return 0.0;
  const double value = top * std::pow(((sv.array() / top).pow(p)).sum(), 1.0 / p);
  const Eigen::VectorXd w = (sv.array() / value).pow(p - 2.0) / value;
  const Matrix& v = es.eigenvectors();
  const Matrix grad = a * (v * w.cast<Complex>().asDiagonal() * v.adjoint());
  const Eigen::Index k = x.ambient_dim;
  const Eigen::Index dim = x.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Matrix block = grad.block(i * k, j * k, k, k);
      const Eigen::Index base = (static_cast<Eigen::Index>(i) * n + j) * dim;
      for (Eigen::Index m = 0; m < dim; ++m)
        direction(base + m) =
            (block.array() * x.basis[static_cast<std::size_t>(m)].array().conjugate()).sum();
    }
  return value;
}

struct AscentProblem {
  const OperatorSystemSpan& x;
  const OperatorSystemSpan& y;
  const Matrix& u;
  int n;

  double ratio(const Flat& c) const {
    const double h = norm_of(x, c, n);
    if (h == 0.0) return 0.0;
    return norm_of(y, apply_flat(u, c, n), n) / h;
  }

  // Gradient of g/h given both norms and their directions in X coordinates.
  Flat ratio_direction(double h, const Flat& dh, double g, const Flat& dg) const {
    const Eigen::Index dim = x.dim();
    Flat dgx(dh.size());
    const Matrix uh = u.adjoint();
    for (Eigen::Index e = 0; e < static_cast<Eigen::Index>(n) * n; ++e)
      dgx.segment(e * dim, dim) = uh * dg.segment(e * u.rows(), u.rows());
    return (dgx * h - dh * g) / (h * h);
  }

  // Ascent from c; returns the best exact ratio met and leaves c there,
  // normalized. Quasi-Newton stages on the Schatten-p ratio with growing p
  // come first, then steepest ascent on the exact ratio.
  double climb(Flat& c, int iterations) const {
    double h = norm_of(x, c, n);
    if (h == 0.0) return 0.0;
    c /= h;
    double best = ratio(c);
    Flat best_c = c;
    const Eigen::Index len = c.size();
    auto to_real = [&](const Flat& v) {
      Eigen::VectorXd r(2 * len);
      r << v.real(), v.imag();
      return r;
    };
    auto to_flat = [&](const Eigen::VectorXd& r) {
      Flat v(len);
      v.real() = r.head(len);
      v.imag() = r.tail(len);
      return v;
    };
    auto consider = [&](const Flat& v) {
      const double hv = norm_of(x, v, n);
      if (!(hv > 0.0)) return;
      const double r = norm_of(y, apply_flat(u, v, n), n) / hv;
      if (r > best) {
        best = r;
        best_c = v / hv;
      }
    };
    static constexpr double kPowers[] = {8.0, 64.0, 512.0};
    for (double p : kPowers) {
      auto value = [&](const Eigen::VectorXd& r) {
        Flat dh, dg;
        const Flat v = to_flat(r);
        const double hv = schatten_with_direction(x, v, n, p, dh);
        const double gv = schatten_with_direction(y, apply_flat(u, v, n), n, p, dg);
        return hv > 0.0 ? -gv / hv : 0.0;
      };
      auto grad = [&](const Eigen::VectorXd& r) {
        Flat dh, dg;
        const Flat v = to_flat(r);
        const double hv = schatten_with_direction(x, v, n, p, dh);
        const double gv = schatten_with_direction(y, apply_flat(u, v, n), n, p, dg);
        if (!(hv > 0.0)) return Eigen::VectorXd(Eigen::VectorXd::Zero(2 * len));
        return Eigen::VectorXd(-to_real(ratio_direction(hv, dh, gv, dg)));
      };
      optimize::BfgsOptions bo;
      bo.max_iters = std::max(iterations / 4, 10);
      bo.g_tol = 1e-12;
      const auto res = optimize::bfgs(value, grad, to_real(c), bo);
      Flat v = to_flat(res.x);
      const double hv = norm_of(x, v, n);
      if (hv > 0.0) c = v / hv;
      consider(c);
    }
    c = best_c;
    double f = best;
    double step = 0.01;
    for (int it = 0; it < iterations && step > 1e-12; ++it) {
      Flat dh, dg;
      const double hv = norm_with_direction(x, c, n, dh);
      const double gv = norm_with_direction(y, apply_flat(u, c, n), n, dg);
      Flat dir = ratio_direction(hv, dh, gv, dg);
      const double dn = dir.norm();
      if (!(dn >= 1e-15)) break;
      dir /= dn;
      bool moved = false;
      while (step > 1e-12) {
        Flat trial = c + step * dir;
        const double ht = norm_of(x, trial, n);
        if (ht > 0.0) {
          trial /= ht;
          const double ft = ratio(trial);
          if (ft > f) {
            c = std::move(trial);
            f = ft;
            step *= 1.6;
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (f < best) {
      c = best_c;
      f = best;
    }
    return f;
  }
};

Matrix coords_to_matrix(const Eigen::VectorXd& p, Eigen::Index n) {
  Matrix u(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      u(i, j) = Complex(p(j * n + i), p(n * n + j * n + i));
  return u;
}

Eigen::VectorXd matrix_to_coords(const Matrix& u) {
  const Eigen::Index n = u.rows();
  Eigen::VectorXd p(2 * n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      p(j * n + i) = u(i, j).real();
      p(n * n + j * n + i) = u(i, j).imag();
    }
  return p;
}

double condition_of(const Matrix& m) {
  const Eigen::VectorXd s = linalg::singular_values(m);
  const double lo = s(s.size() - 1);
  return lo == 0.0 ? kInf : s(0) / lo;
}

// Objective evaluator that keeps the last argmax of each side as a warm start.
struct WarmObjective {
  const OperatorSystemSpan& x;
  const OperatorSystemSpan& y;
  int level;
  InnerBudget budget;
  std::uint64_t seed;
  std::vector<AmplifiedElement> warm_fwd;
  std::vector<AmplifiedElement> warm_inv;

  ObjectiveTerms terms(const Matrix& u) {
    ObjectiveTerms t;
    if (!u.allFinite() || condition_of(u) > kMaxCondition) {
      t.unit_defect = kInf;
      t.log_forward = kInf;
      t.log_inverse = kInf;
      return t;
    }
    const Matrix uinv = u.inverse();
    t.unit_defect = linalg::op_norm(y.element(u * x.unit_coeffs) -
                                    Matrix::Identity(y.ambient_dim, y.ambient_dim));
    auto fwd = estimate_map_norm(x, y, u, level, budget, seed, warm_fwd);
    auto inv = estimate_map_norm(y, x, uinv, level, budget, seed ^ 0x9e3779b97f4a7c15ull,
                                 warm_inv);
    t.log_forward = std::log(fwd.value);
    t.log_inverse = std::log(inv.value);
    warm_fwd = {std::move(fwd.argmax)};
    warm_inv = {std::move(inv.argmax)};
    return t;
  }
};

AmplifiedElement embed(const AmplifiedElement& a, int level) {
  AmplifiedElement out(level, a.coeffs.front().size());
  for (int i = 0; i < a.level; ++i)
    for (int j = 0; j < a.level; ++j) out.at(i, j) = a.at(i, j);
  return out;
}

// Orthonormal self-adjoint frame e_0 = I, e_1, ... of a system for the
// normalized Hilbert-Schmidt form Re tau(ab); columns of `coords` are the
// basis coordinates of the frame elements.
struct HermitianFrame {
  std::vector<Matrix> elems;
  Matrix coords;
  Matrix coords_inv;
};

double tau(const Matrix& a) { return a.trace().real() / static_cast<double>(a.rows()); }

HermitianFrame hermitian_frame(const OperatorSystemSpan& x) {
  const Eigen::Index k = x.ambient_dim;
  const Eigen::Index n = x.dim();
  std::vector<Matrix> cand{Matrix::Identity(k, k)};
  for (const auto& b : x.basis) {
    cand.push_back((b + b.adjoint()) * 0.5);
    cand.push_back((b - b.adjoint()) * Complex(0.0, -0.5));
  }
  HermitianFrame f;
  for (const auto& c : cand) {
    Matrix v = c;
    const double before = std::sqrt(std::max(tau(c * c), 0.0));
    for (const auto& e : f.elems) v -= tau(e * v) * e;
    const double after = std::sqrt(std::max(tau(v * v), 0.0));
    if (after <= 1e-8 * std::max(before, 1.0)) continue;
    f.elems.push_back(v / after);
    if (static_cast<Eigen::Index>(f.elems.size()) == n) break;
  }
  if (static_cast<Eigen::Index>(f.elems.size()) != n)
    throw InvalidInput("distance: system has no self-adjoint frame of full size");
  f.coords.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    f.coords.col(a) = x.coordinates(f.elems[static_cast<std::size_t>(a)]);
  f.coords_inv = f.coords.inverse();
  return f;
}

// Coordinates used by the outer search. Unital charts parametrize the real
// maps between self-adjoint parts fixing the unit (N(N-1) parameters); free
// charts use all 2N^2 real coordinates of the map.
struct MapChart {
  HermitianFrame fx, fy;
  Eigen::Index n = 0;

  Matrix from_real(const Eigen::MatrixXd& r) const {
    return fy.coords * r.cast<Complex>() * fx.coords_inv;
  }

  Eigen::MatrixXd to_real(const Matrix& m) const {
    return (fy.coords_inv * m * fx.coords).real();
  }

  Matrix map(const Eigen::VectorXd& p, bool unital) const {
    if (!unital) return coords_to_matrix(p, n);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    r(0, 0) = 1.0;
    for (Eigen::Index j = 1; j < n; ++j) r.col(j) = p.segment((j - 1) * n, n);
    return from_real(r);
  }

  Eigen::VectorXd params(const Matrix& m, bool unital) const {
    if (!unital) return matrix_to_coords(m);
    const Eigen::MatrixXd r = to_real(m);
    Eigen::VectorXd p(n * (n - 1));
    for (Eigen::Index j = 1; j < n; ++j) p.segment((j - 1) * n, n) = r.col(j);
    return p;
  }
};

// Orthogonal matrix S exp(K) for the skew matrix K with strict upper part q.
Eigen::MatrixXd orthogonal_from(const Eigen::VectorXd& q, Eigen::Index m, bool reflect) {
  Eigen::MatrixXd kmat = Eigen::MatrixXd::Zero(m, m);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      kmat(i, j) = q(idx);
      kmat(j, i) = -q(idx);
      ++idx;
    }
  // K = iH with H Hermitian, so exp(K) = V exp(i Lambda) V*.
  const Matrix h = kmat.cast<Complex>() * Complex(0.0, -1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(m);
  for (Eigen::Index i = 0; i < m; ++i) phases(i) = std::polar(1.0, es.eigenvalues()(i));
  Eigen::MatrixXd o = (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint()).real();
  if (reflect) o.row(0) *= -1.0;
  return o;
}

// Trace moments tau(e_a e_b e_c) and tau(e_a e_b e_c e_d) over the traceless
// frame elements, flattened.
std::vector<Vector> frame_moments(const HermitianFrame& f) {
  const std::size_t m = f.elems.size() - 1;
  Vector t3(static_cast<Eigen::Index>(m * m * m));
  Vector t4(static_cast<Eigen::Index>(m * m * m * m));
  auto e = [&](std::size_t a) -> const Matrix& { return f.elems[a + 1]; };
  const double k = static_cast<double>(f.elems.front().rows());
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const Matrix ab = e(a) * e(b);
      for (std::size_t c = 0; c < m; ++c) {
        const Matrix abc = ab * e(c);
        t3(static_cast<Eigen::Index>((a * m + b) * m + c)) = abc.trace() / k;
        for (std::size_t d = 0; d < m; ++d)
          t4(static_cast<Eigen::Index>(((a * m + b) * m + c) * m + d)) = (abc * e(d)).trace() / k;
      }
    }
  return {t3, t4};
}

// Applies O in every mode of a flattened m^order tensor.
Vector transform_tensor(const Vector& t, const Eigen::MatrixXd& o, int order) {
  const Eigen::Index m = o.rows();
  Vector cur = t;
  Eigen::Index stride = 1;
  for (int mode = 0; mode < order; ++mode) {
    Vector next = Vector::Zero(cur.size());
    for (Eigen::Index i = 0; i < cur.size(); ++i) {
      const Eigen::Index digit = (i / stride) % m;
      const Eigen::Index base = i - digit * stride;
      // T'(.., a, ..) = sum_a' O(a', a) T(.., a', ..)
      for (Eigen::Index a = 0; a < m; ++a) next(base + a * stride) += o(digit, a) * cur(i);
    }
    cur = std::move(next);
    stride *= m;
  }
  return cur;
}

// Candidate trace-preserving unital *-map X -> Y matching third and fourth
// trace moments in the two frames. Exact when Y is a unitary conjugate of X.
Matrix moment_matched_map(const MapChart& chart, std::uint64_t seed) {
  const Eigen::Index n = chart.n;
  const Eigen::Index m = n - 1;
  auto lift = [&](const Eigen::MatrixXd& o) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
    r.bottomRightCorner(m, m) = o;
    return chart.from_real(r);
  };
  if (m == 0) return lift(Eigen::MatrixXd(0, 0));
  const auto mx = frame_moments(chart.fx);
  const auto my = frame_moments(chart.fy);
  const Eigen::Index dof = m * (m - 1) / 2;

  auto residual = [&](const Eigen::VectorXd& q, bool reflect) {
    const Eigen::MatrixXd o = orthogonal_from(q, m, reflect);
    const Vector d3 = transform_tensor(my[0], o, 3) - mx[0];
    const Vector d4 = transform_tensor(my[1], o, 4) - mx[1];
    Eigen::VectorXd r(2 * (d3.size() + d4.size()));
    r << d3.real(), d3.imag(), d4.real(), d4.imag();
    return r;
  };

  double best_val = kInf;
  Eigen::MatrixXd best_o = Eigen::MatrixXd::Identity(m, m);
  auto rng = split_stream(seed, 31);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (bool reflect : {false, true}) {
    if (dof == 0) {
      const double v = residual(Eigen::VectorXd(0), reflect).norm();
      if (v < best_val) {
        best_val = v;
        best_o = orthogonal_from(Eigen::VectorXd(0), m, reflect);
      }
      continue;
    }
    for (int s = 0; s < 8; ++s) {
      Eigen::VectorXd q = Eigen::VectorXd::Zero(dof);
      if (s > 0)
        for (Eigen::Index i = 0; i < dof; ++i) q(i) = angle(rng);
      optimize::NelderMeadOptions nm;
      nm.max_evals = static_cast<int>(300 * dof);
      nm.initial_step = 0.5;
      nm.reinits = 1;
      q = optimize::nelder_mead([&](const Eigen::VectorXd& p) { return residual(p, reflect).squaredNorm(); },
                                q, nm)
              .x;
      // Gauss-Newton polish with a central-difference Jacobian.
      for (int it = 0; it < 20; ++it) {
        const Eigen::VectorXd r0 = residual(q, reflect);
        Eigen::MatrixXd jac(r0.size(), dof);
        for (Eigen::Index i = 0; i < dof; ++i) {
          Eigen::VectorXd qp = q, qm = q;
          qp(i) += 1e-6;
          qm(i) -= 1e-6;
          jac.col(i) = (residual(qp, reflect) - residual(qm, reflect)) / 2e-6;
        }
        const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r0);
        const Eigen::VectorXd trial = q + step;
        if (!(residual(trial, reflect).norm() < r0.norm())) break;
        q = trial;
      }
      const double v = residual(q, reflect).norm();
      if (v < best_val) {
        best_val = v;
        best_o = orthogonal_from(q, m, reflect);
      }
    }
  }
  return lift(best_o);
}

// Seeded start for restart r >= 2: a random orthogonal map of the traceless
// parts (even r) or a perturbation of the identity coordinates (odd r).
Matrix random_start(const MapChart& chart, std::mt19937_64& rng, bool near_identity) {
  const Eigen::Index n = chart.n;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd noise(n, n);
  for (Eigen::Index i = 0; i < n * n; ++i) noise(i) = gauss(rng);
  noise.col(0).setZero();
  if (near_identity) {
    Eigen::MatrixXd r = chart.to_real(Matrix::Identity(n, n));
    r.col(0) = Eigen::VectorXd::Unit(n, 0);
    return chart.from_real(r + 0.2 * noise);
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  if (n > 1) {
    Eigen::MatrixXd g(n - 1, n - 1);
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    r.bottomRightCorner(n - 1, n - 1) = q;
  }
  return chart.from_real(r + 0.05 * noise);
}

MapChart make_chart(const OperatorSystemSpan& x, const OperatorSystemSpan& y) {
  return MapChart{hermitian_frame(x), hermitian_frame(y), x.dim()};
}

struct StartSpec {
  Matrix start;
  double step = 0.1;
  bool flip = false;  // search Y -> X and invert the result
};

// Level-1 starts. Restarts come in pairs 2b, 2b + 1 sharing the base start b
// (identity coordinates, the moment-matched map, then seeded random maps);
// the odd member searches from the Y side. Swapping X and Y therefore only
// permutes the searches.
StartSpec first_level_start(const MapChart& fwd, const MapChart& bwd, const SearchOptions& opts,
                            std::size_t r) {
  const std::size_t b = r / 2;
  const bool flip = (r % 2) == 1;
  const MapChart& chart = flip ? bwd : fwd;
  if (b == 0) return {Matrix::Identity(chart.n, chart.n), 0.1, flip};
  if (b == 1) return {moment_matched_map(chart, opts.seed), 0.05, flip};
  auto rng = split_stream(opts.seed, 1000 + b);
  const bool near = (b % 2) == 1;
  return {random_start(chart, rng, near), near ? 0.1 : 0.25, flip};
}

struct RestartResult {
  double value = kInf;
  ObjectiveTerms terms;
  Matrix map;
  bool converged = false;
  bool done = false;
};

// Finite family of normalized test elements; the largest image norm over the
// family is a cheap lower bound for the amplified map norm.
struct ActiveSet {
  const OperatorSystemSpan& from;
  const OperatorSystemSpan& to;
  int n;
  std::vector<Flat> probes;

  void add(const Flat& c) {
    const double h = norm_of(from, c, n);
    if (h > 0.0 && std::isfinite(h)) probes.push_back(c / h);
  }

  double value(const Matrix& u) const {
    double best = 0.0;
    for (const auto& c : probes) best = std::max(best, norm_of(to, apply_flat(u, c, n), n));
    return best;
  }

  void log_values(const Matrix& u, std::vector<double>& out) const {
    for (const auto& c : probes) out.push_back(std::log(norm_of(to, apply_flat(u, c, n), n)));
  }
};

// mu * log sum exp(v / mu): a smooth upper bound of max(v) within mu log |v|.
double soft_max(const std::vector<double>& v, double mu) {
  const double top = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double a : v) acc += std::exp((a - top) / mu);
  return top + mu * std::log(acc);
}

// Smoothed active-set objective for maps in the unital chart.
double smooth_restricted(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                         const ActiveSet& fwd, const ActiveSet& bwd, const Matrix& u,
                         double mu) {
  if (!u.allFinite() || condition_of(u) > kMaxCondition) return kInf;
  std::vector<double> terms{linalg::op_norm(y.element(u * x.unit_coeffs) -
                                            Matrix::Identity(y.ambient_dim, y.ambient_dim))};
  fwd.log_values(u, terms);
  bwd.log_values(u.inverse(), terms);
  return soft_max(terms, mu);
}

ObjectiveTerms restricted_terms(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                                const ActiveSet& fwd, const ActiveSet& bwd,
                                const Matrix& u) {
  ObjectiveTerms t;
  if (!u.allFinite() || condition_of(u) > kMaxCondition) {
    t.unit_defect = t.log_forward = t.log_inverse = kInf;
    return t;
  }
  t.unit_defect = linalg::op_norm(y.element(u * x.unit_coeffs) -
                                  Matrix::Identity(y.ambient_dim, y.ambient_dim));
  t.log_forward = std::log(fwd.value(u));
  t.log_inverse = std::log(bwd.value(u.inverse()));
  return t;
}

// Outer search on the active-set objective. After each round the map found is
// scored with the full inner ascent and its maximizers join the active sets.
RestartResult run_restart(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                          const MapChart& chart, int level, const Matrix& start,
                          const SearchOptions& opts, std::uint64_t inner_seed, double step) {
  const auto n = x.dim();
  ActiveSet fwd{x, y, level, {}}, bwd{y, x, level, {}};
  fwd.add(flatten(opsys::unit_element(x, level)));
  bwd.add(flatten(opsys::unit_element(y, level)));
  auto rng = split_stream(inner_seed, 7);
  const Eigen::Index len = static_cast<Eigen::Index>(level) * level * n;
  for (int i = 0; i < opts.probes; ++i) {
    fwd.add(linalg::random_gaussian(rng, len, 1).col(0));
    bwd.add(linalg::random_gaussian(rng, len, 1).col(0));
  }

  WarmObjective full{x, y, level, opts.round_inner, inner_seed, {}, {}};
  RestartResult r;
  r.map = start;
  r.terms = full.terms(start);
  r.value = r.terms.value();
  r.converged = true;
  Matrix current = start;
  // Unital rounds first, then one round over all invertible maps.
  const int unital_rounds = std::max(opts.rounds - 1, 1);
  const bool free_round = opts.rounds > 1 && n > 1;
  for (int round = 0; round < unital_rounds + (free_round ? 1 : 0); ++round) {
    if (r.value <= opts.zero_threshold) break;
    const bool unital = round < unital_rounds;
    if (unital && n == 1) continue;
    if (!unital) current = r.map;
    for (const auto& a : full.warm_fwd) fwd.add(flatten(a));
    for (const auto& a : full.warm_inv) bwd.add(flatten(a));
    Eigen::VectorXd p0 = chart.params(current, unital);
    if (unital) {
      // Continuation on the smoothed maximum, then a simplex polish on the
      // exact one.
      for (double mu : {1e-2, 1e-3, 1e-4}) {
        optimize::BfgsOptions bo;
        bo.max_iters = 100;
        p0 = optimize::bfgs(
                 [&](const Eigen::VectorXd& p) {
                   return smooth_restricted(x, y, fwd, bwd, chart.map(p, true), mu);
                 },
                 p0, bo)
                 .x;
      }
    }
    optimize::NelderMeadOptions nm;
    nm.max_evals = opts.max_evals;
    nm.initial_step = unital ? std::ldexp(step, -round) * 0.1 : 0.02;
    const auto res = optimize::nelder_mead(
        [&](const Eigen::VectorXd& p) {
          return restricted_terms(x, y, fwd, bwd, chart.map(p, unital)).value();
        },
        p0, nm);
    current = chart.map(res.x, unital);
    const auto terms = full.terms(current);
    r.converged = res.converged;
    if (terms.value() < r.value) {
      r.value = terms.value();
      r.terms = terms;
      r.map = current;
    }
    // The active-set value is a lower bound of the full one; once they agree
    // the unital rounds are done.
    if (unital && terms.value() - res.value <= 1e-9 * (1.0 + std::abs(terms.value())))
      round = unital_rounds - 1;
  }

  WarmObjective final_eval{x, y, level, opts.final_inner, inner_seed, full.warm_fwd,
                           full.warm_inv};
  r.terms = final_eval.terms(r.map);
  r.value = r.terms.value();
  r.done = true;
  return r;
}

// Smallest counted index: restarts after the first one reaching the zero
// threshold are not counted, whatever order they finished in.
std::size_t pick_best(const std::vector<RestartResult>& rs, double zero,
                      int& counted) {
  std::size_t limit = rs.size();
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (rs[i].done && rs[i].value <= zero) {
      limit = i + 1;
      break;
    }
  counted = static_cast<int>(limit);
  std::size_t best = 0;
  for (std::size_t i = 1; i < limit; ++i)
    if (rs[i].value < rs[best].value) best = i;
  return best;
}

double unit_defect_of(const OperatorSystemSpan& x, const OperatorSystemSpan& y, const Matrix& u) {
  return linalg::op_norm(y.element(u * x.unit_coeffs) -
                         Matrix::Identity(y.ambient_dim, y.ambient_dim));
}

// Turns a Y -> X restart result into the X -> Y one.
void invert_result(const OperatorSystemSpan& x, const OperatorSystemSpan& y, RestartResult& r) {
  if (!r.map.allFinite() || condition_of(r.map) > kMaxCondition) {
    r.value = kInf;
    return;
  }
  r.map = r.map.inverse().eval();
  std::swap(r.terms.log_forward, r.terms.log_inverse);
  r.terms.unit_defect = unit_defect_of(x, y, r.map);
  r.value = r.terms.value();
}

struct Charts {
  MapChart fwd;  // X -> Y
  MapChart bwd;  // Y -> X
};

Charts make_charts(const OperatorSystemSpan& x, const OperatorSystemSpan& y) {
  Charts c{make_chart(x, y), {}};
  c.bwd = MapChart{c.fwd.fy, c.fwd.fx, c.fwd.n};
  return c;
}

template <class StartFn>
std::vector<RestartResult> run_restarts(const OperatorSystemSpan& x,
                                        const OperatorSystemSpan& y, const Charts& charts,
                                        int level, const SearchOptions& opts,
                                        StartFn&& start_of) {
  const auto count = static_cast<std::size_t>(std::max(opts.restarts, 1));
  std::vector<RestartResult> results(count);
  std::atomic<std::size_t> first_zero{count};
  parallel_for(count, opts.jobs, [&](std::size_t r) {
    if (r > first_zero.load()) return;
    const StartSpec spec = start_of(r);
    // Paired restarts share the seed, so a flipped search repeats its partner
    // in the swapped problem.
    const std::uint64_t inner_seed =
        opts.seed * 1000003ull + static_cast<std::uint64_t>(level) * 7919ull + r / 2;
    if (spec.flip) {
      results[r] = run_restart(y, x, charts.bwd, level, spec.start, opts, inner_seed, spec.step);
      invert_result(x, y, results[r]);
    } else {
      results[r] = run_restart(x, y, charts.fwd, level, spec.start, opts, inner_seed, spec.step);
    }
    if (results[r].value <= opts.zero_threshold) {
      std::size_t cur = first_zero.load();
      while (r < cur && !first_zero.compare_exchange_weak(cur, r)) {
      }
    }
  });
  return results;
}

std::vector<double> level_profile(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                                  const Matrix& u, int n_max, const InnerBudget& budget,
                                  std::uint64_t seed) {
  std::vector<double> out;
  if (condition_of(u) > kMaxCondition) return std::vector<double>(static_cast<std::size_t>(n_max), kInf);
  const Matrix uinv = u.inverse();
  const double unit = linalg::op_norm(y.element(u * x.unit_coeffs) -
                                      Matrix::Identity(y.ambient_dim, y.ambient_dim));
  std::vector<AmplifiedElement> wf, wi;
  double fwd = 0.0, inv = 0.0;
  for (int level = 1; level <= n_max; ++level) {
    std::vector<AmplifiedElement> ef, ei;
    for (const auto& a : wf) ef.push_back(embed(a, level));
    for (const auto& a : wi) ei.push_back(embed(a, level));
    auto f = estimate_map_norm(x, y, u, level, budget, seed, ef);
    auto i = estimate_map_norm(y, x, uinv, level, budget, seed ^ 0x9e3779b97f4a7c15ull, ei);
    fwd = std::max(fwd, f.value);
    inv = std::max(inv, i.value);
    wf = {f.argmax};
    wi = {i.argmax};
    out.push_back(std::max({unit, std::log(fwd), std::log(inv)}));
  }
  return out;
}

void require_comparable(const OperatorSystemSpan& x, const OperatorSystemSpan& y) {
  if (x.dim() != y.dim())
    throw NotComparableError("distance: systems have different dimensions");
}

}  // namespace

LinearMapCoords LinearMapCoords::from(Matrix m) {
  if (m.rows() != m.cols()) throw DimensionError("LinearMapCoords: matrix not square");
  LinearMapCoords c;
  c.condition = condition_of(m);
  c.matrix = std::move(m);
  return c;
}

LinearMapCoords LinearMapCoords::identity(Eigen::Index n) {
  return from(Matrix::Identity(n, n));
}

double ObjectiveTerms::value() const {
  return std::max({unit_defect, log_forward, log_inverse});
}

AmplifiedElement apply_map(const Matrix& u, const AmplifiedElement& a) {
  AmplifiedElement out(a.level, u.rows());
  for (std::size_t e = 0; e < a.coeffs.size(); ++e) out.coeffs[e] = u * a.coeffs[e];
  return out;
}

NormEstimate estimate_map_norm(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                               const Matrix& u, int level, const InnerBudget& budget,
                               std::uint64_t seed,
                               const std::vector<AmplifiedElement>& warm) {
  if (u.cols() != x.dim() || u.rows() != y.dim())
    throw DimensionError("amplified_map_norm: map does not match system dimensions");
  if (level < 1) throw InvalidInput("amplified_map_norm: level must be >= 1");
  AscentProblem prob{x, y, u, level};

  std::vector<Flat> starts;
  starts.push_back(flatten(opsys::unit_element(x, level)));
  for (const auto& w : warm)
    if (w.level == level) starts.push_back(flatten(w));
  auto rng = split_stream(seed, static_cast<std::uint64_t>(level));
  const Eigen::Index len = static_cast<Eigen::Index>(level) * level * x.dim();
  while (static_cast<int>(starts.size()) < std::max(budget.starts, 1) + static_cast<int>(warm.size()))
    starts.push_back(linalg::random_gaussian(rng, len, 1).col(0));

  NormEstimate best;
  best.value = -1.0;
  for (auto& c : starts) {
    const double f = prob.climb(c, budget.iterations);
    if (f > best.value) {
      best.value = f;
      best.argmax = unflatten(c, level, x.dim());
    }
  }
  return best;
}

double amplified_map_norm(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                          const LinearMapCoords& u, int level,
                          const InnerBudget& budget, std::uint64_t seed) {
  return estimate_map_norm(x, y, u.matrix, level, budget, seed).value;
}

ObjectiveTerms evaluate_objective(const OperatorSystemSpan& x,
                                  const OperatorSystemSpan& y, const Matrix& u,
                                  int level, const InnerBudget& budget,
                                  std::uint64_t seed) {
  require_comparable(x, y);
  WarmObjective obj{x, y, level, budget, seed, {}, {}};
  return obj.terms(u);
}

LevelEstimate dn_estimate(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                          int level, const SearchOptions& opts) {
  require_comparable(x, y);
  if (level < 1) throw InvalidInput("dn_estimate: level must be >= 1");
  const Charts charts = make_charts(x, y);
  auto results = run_restarts(x, y, charts, level, opts, [&](std::size_t r) {
    return first_level_start(charts.fwd, charts.bwd, opts, r);
  });
  LevelEstimate est;
  est.level = level;
  const std::size_t b = pick_best(results, opts.zero_threshold, est.restarts_used);
  est.best_restart = static_cast<int>(b);
  est.value = results[b].value;
  est.terms = results[b].terms;
  est.best_map = LinearMapCoords::from(results[b].map);
  est.converged = results[b].converged;
  est.profile = level_profile(x, y, results[b].map, level, opts.final_inner, opts.seed);
  return est;
}

DistanceReport dgh_weighted(const OperatorSystemSpan& x, const OperatorSystemSpan& y,
                            int n_max, const SearchOptions& opts) {
  require_comparable(x, y);
  if (n_max < 1) throw InvalidInput("dgh_weighted: n_max must be >= 1");
  const Eigen::Index n = x.dim();
  const Charts charts = make_charts(x, y);
  DistanceReport rep;
  rep.seed = opts.seed;
  rep.restarts = opts.restarts;

  std::vector<RestartResult> prev;
  int prev_counted = 0;
  for (int level = 1; level <= n_max; ++level) {
    auto results = run_restarts(x, y, charts, level, opts, [&](std::size_t r) {
      // Odd restarts reuse the level-1 starts: a level-1 optimum need not be
      // a good start at higher levels.
      if (level == 1 || r % 2 == 1) return first_level_start(charts.fwd, charts.bwd, opts, r);
      // Best previous-level map among restarts 0..r (counted ones only),
      // searched alternately from the X and the Y side.
      const std::size_t upto = std::min<std::size_t>(r + 1, static_cast<std::size_t>(prev_counted));
      std::size_t best = 0;
      for (std::size_t i = 1; i < upto; ++i)
        if (prev[i].value < prev[best].value) best = i;
      const bool flip = (r / 2) % 2 == 1 && condition_of(prev[best].map) <= kMaxCondition;
      Matrix start = flip ? Matrix(prev[best].map.inverse()) : prev[best].map;
      if (r > 0) {
        // Perturb inside the unital *-preserving maps.
        auto rng = split_stream(opts.seed, 50000 + static_cast<std::uint64_t>(level) * 1000 + r);
        std::normal_distribution<double> gauss(0.0, 0.05);
        Eigen::MatrixXd noise(n, n);
        for (Eigen::Index i = 0; i < n * n; ++i) noise(i) = gauss(rng);
        noise.col(0).setZero();
        start += (flip ? charts.bwd : charts.fwd).from_real(noise);
      }
      return StartSpec{start, 0.05, flip};
    });
    LevelEstimate est;
    est.level = level;
    const std::size_t b = pick_best(results, opts.zero_threshold, est.restarts_used);
    est.best_restart = static_cast<int>(b);
    est.value = results[b].value;
    est.terms = results[b].terms;
    est.best_map = LinearMapCoords::from(results[b].map);
    est.converged = results[b].converged;
    est.profile = level_profile(x, y, results[b].map, n_max, opts.final_inner, opts.seed);
    rep.converged = rep.converged && est.converged;
    rep.weighted += std::ldexp(est.value, -level);
    rep.per_level.push_back(std::move(est));
    prev = std::move(results);
    prev_counted = rep.per_level.back().restarts_used;
  }
  return rep;
}

Matrix wt_matrix(const WtParams& p) {
  if (!(p.t > 0.0 && p.t <= 1.0))
    throw InvalidInput("wt_matrix: t must lie in (0, 1]");
  if (p.variant == WtVariant::ThreeByThree) {
    Matrix w = Matrix::Zero(3, 3);
    w(1, 0) = 1.0;
    w(2, 1) = p.t;
    return w;
  }
  Matrix w = Matrix::Zero(2, 2);
  w(0, 0) = 1.0;
  w(1, 0) = p.t;
  return w;
}

OperatorSystemSpan wt_system(const WtParams& p) {
  return opsys::build_system({wt_matrix(p)}, true);
}

int commutant_dimension(const Matrix& w, double tol) {
  const Eigen::Index k = w.rows();
  const Matrix id = Matrix::Identity(k, k);
  // vec(ZA - AZ) = (A^T (x) I - I (x) A) vec(Z)
  auto comm = [&](const Matrix& a) {
    return Matrix(linalg::kron(a.transpose(), id) - linalg::kron(id, a));
  };
  Matrix stacked(2 * k * k, k * k);
  stacked << comm(w), comm(w.adjoint());
  const Eigen::VectorXd s = linalg::singular_values(stacked);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++rank;
  return static_cast<int>(k * k) - rank;
}

std::pair<Complex, Complex> trace_invariants(const OperatorSystemSpan& x,
                                             const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() != x.ambient_dim)
    throw DimensionError("trace_invariants: matrix size differs from ambient size");
  const double k = static_cast<double>(g.rows());
  return {g.trace() / k, (g * g).trace() / k};
}

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Matrix su2(const Eigen::VectorXd& p) {
  const double th = p(0), ph = p(1), ps = p(2);
  Matrix u(2, 2);
  u << std::cos(th) * std::polar(1.0, ph), -std::sin(th) * std::polar(1.0, -ps),
      std::sin(th) * std::polar(1.0, ps), std::cos(th) * std::polar(1.0, -ph);
  return u;
}

WtDecision classify_3x3(double t, double s, double tol) {
  WtDecision d;
  d.method = unitary::Method::TheoremFastPath;
  const Matrix wt = wt_matrix({t, WtVariant::ThreeByThree});
  const Matrix ws = wt_matrix({s, WtVariant::ThreeByThree});
  d.trace_w = (wt.trace() / 3.0).real();
  d.trace_w_sq = ((wt * wt).trace() / 3.0).real();
  d.cross_trace = ((ws * ws.adjoint() + ws.adjoint() * ws).trace() / 3.0).real();
  d.singular_t = to_std(linalg::singular_values(wt));
  d.singular_s = to_std(linalg::singular_values(ws));
  d.steps.push_back("conjugation preserves the trace: alpha = tau(W_t) = " +
                    short_num(d.trace_w) + ", so alpha = 0");
  d.steps.push_back("tau(W_t^2) = " + short_num(d.trace_w_sq) + " = beta*gamma*" +
                    short_num(d.cross_trace) + " with the factor positive, so beta*gamma = 0");
  d.steps.push_back("branch gamma = 0: singular values {0, 1, t} must equal |beta| {0, 1, s}; "
                    "|beta| = 1 and s = t, or |beta| = t and |beta| s = 1, which needs t = s = 1");
  d.steps.push_back("branch beta = 0: W_s* has the same singular values, same conclusion");
  if (std::abs(t - s) <= tol) {
    d.verdict = unitary::Verdict::Isomorphic;
    WtWitness w{Matrix::Identity(3, 3), 0.0, 1.0, 0.0, linalg::op_norm(wt - ws)};
    d.witness = w;
    d.steps.push_back("s = t: identity conjugation witnesses the isomorphism");
  } else {
    d.verdict = unitary::Verdict::NotIsomorphic;
    d.steps.push_back("s != t: both branches are infeasible");
  }
  d.note = "3x3 family: decided by the trace and singular-value argument";
  return d;
}

WtDecision classify_2x2(double t, double s, const WtOracleOptions& oracle) {
  WtDecision d;
  d.method = unitary::Method::Oracle;
  d.restarts = oracle.restarts;
  d.seed = oracle.seed;
  // Canonical direction keeps the verdict exactly symmetric in (t, s).
  const double a = std::min(t, s), b = std::max(t, s);
  const Matrix wa = wt_matrix({a, WtVariant::TwoByTwo});
  const Matrix wb = wt_matrix({b, WtVariant::TwoByTwo});
  d.singular_t = to_std(linalg::singular_values(wt_matrix({t, WtVariant::TwoByTwo})));
  d.singular_s = to_std(linalg::singular_values(wt_matrix({s, WtVariant::TwoByTwo})));
  Matrix span(4, 3);
  span.col(0) = linalg::vec(Matrix::Identity(2, 2));
  span.col(1) = linalg::vec(wb);
  span.col(2) = linalg::vec(wb.adjoint());
  const linalg::SpanProjector proj(span);
  auto residual = [&](const Eigen::VectorXd& p) {
    const Matrix u = su2(p);
    return proj.residual(linalg::vec(u * wa * u.adjoint()));
  };

  const auto count = static_cast<std::size_t>(std::max(oracle.restarts, 1));
  std::vector<optimize::MinimizeResult> runs(count);
  parallel_for(count, oracle.jobs, [&](std::size_t r) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3);
    if (r > 0) {
      auto rng = split_stream(oracle.seed, r);
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      for (Eigen::Index i = 0; i < 3; ++i) x0(i) = angle(rng);
    }
    optimize::NelderMeadOptions nm;
    nm.max_evals = 800;
    nm.initial_step = 0.3;
    runs[r] = optimize::nelder_mead(residual, x0, nm);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < count; ++r)
    if (runs[r].value < runs[best].value) best = r;
  d.min_residual = runs[best].value;

  const Matrix u = su2(runs[best].x);
  const Matrix image = u * wa * u.adjoint();
  const Vector c = proj.coefficients(linalg::vec(image));
  WtWitness w{u, c(0), c(1), c(2),
              linalg::op_norm(image - (c(0) * Matrix::Identity(2, 2) + c(1) * wb +
                                       c(2) * wb.adjoint()))};
  if (d.min_residual <= oracle.accept_tol) {
    d.verdict = unitary::Verdict::Isomorphic;
    d.witness = w;
    d.note = "2x2 family: conjugation witness found by multi-start search";
  } else {
    d.verdict = unitary::Verdict::NotIsomorphic;
    d.note = "2x2 family: residual bounded below across all restarts";
  }
  d.steps.push_back("searched U in SU(2) minimizing the distance from U W_" +
                    short_num(a) + " U* to span{I, W_" + short_num(b) +
                    ", W_" + short_num(b) + "*}");
  return d;
}

}  // namespace

WtDecision wt_classify(double t, double s, WtVariant variant, double tol,
                       const WtOracleOptions& oracle) {
  if (!(t > 0.0 && t <= 1.0) || !(s > 0.0 && s <= 1.0))
    throw InvalidInput("wt_classify: parameters must lie in (0, 1]");
  WtDecision d = variant == WtVariant::ThreeByThree ? classify_3x3(t, s, tol)
                                                    : classify_2x2(t, s, oracle);
  d.t = t;
  d.s = s;
  d.variant = variant;
  return d;
}

}  // namespace osinv::osdist
