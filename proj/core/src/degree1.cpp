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

#include "osinv/degree1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osinv/error.hpp"
#include "osinv/parallel.hpp"
#include "osinv/unitary.hpp"

namespace osinv::degree1 {

using unitary::factorial;
using unitary::nth_permutation;

PointSet::PointSet(int ambient, std::vector<Vector> points, double tol)
    : ambient_(ambient), points_(std::move(points)), tol_(tol) {
  if (ambient_ < 1) throw InvalidInput("PointSet: ambient dimension must be >= 1");
  if (points_.empty()) throw InvalidInput("PointSet: no points");
  for (const auto& p : points_) {
    if (p.size() != ambient_)
      throw InvalidInput("PointSet: point has the wrong number of coordinates");
    if (!p.allFinite()) throw InvalidInput("PointSet: non-finite coordinate");
  }
  for (std::size_t a = 0; a < points_.size(); ++a)
    for (std::size_t b = a + 1; b < points_.size(); ++b)
      if ((points_[a] - points_[b]).norm() <= tol_)
        throw InvalidInput("PointSet: points are not distinct");
}

PointSet PointSet::from_scalars(const std::vector<Complex>& zs, double tol) {
  std::vector<Vector> pts;
  pts.reserve(zs.size());
  for (const auto& z : zs) {
    Vector v(1);
    v(0) = z;
    pts.push_back(std::move(v));
  }
  return PointSet(1, std::move(pts), tol);
}

Complex DegreeOneMap::coefficient(int k, int i, int j) const {
  if (k < 1 || k > ambient || i < 0 || j < 0 || i > ambient || j > ambient)
    throw DimensionError("DegreeOneMap: index out of range");
  return coeffs[static_cast<std::size_t>(k - 1)](i * (ambient + 1) + j);
}

namespace {

Vector monomials_at(const Vector& z) {
  const auto n = z.size();
  Vector ext(n + 1);
  ext(0) = 1.0;
  ext.tail(n) = z;
  Vector out((n + 1) * (n + 1));
  for (Eigen::Index i = 0; i <= n; ++i)
    for (Eigen::Index j = 0; j <= n; ++j)
      out(i * (n + 1) + j) = ext(i) * std::conj(ext(j));
  return out;
}

// Function values of one candidate map: the n coordinate vectors followed by
// the n^2 products value_k conj(value_l), each of length m.
std::vector<Vector> constraint_vectors(const std::vector<Vector>& values, int n) {
  const auto m = static_cast<Eigen::Index>(values.size());
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n + n * n));
  for (int k = 0; k < n; ++k) {
    Vector c(m);
    for (Eigen::Index r = 0; r < m; ++r) c(r) = values[static_cast<std::size_t>(r)](k);
    out.push_back(std::move(c));
  }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      out.push_back(out[static_cast<std::size_t>(k)].cwiseProduct(
          out[static_cast<std::size_t>(l)].conjugate()));
  return out;
}

bool all_in_span(const linalg::SpanProjector& proj, const std::vector<Vector>& vs,
                 double tol) {
  for (const auto& v : vs)
    if (proj.residual(v) > tol * (1.0 + v.norm())) return false;
  return true;
}

std::vector<Vector> permuted(const PointSet& target, const std::vector<int>& h) {
  std::vector<Vector> out;
  out.reserve(h.size());
  for (int j : h) out.push_back(target[static_cast<std::size_t>(j)]);
  return out;
}

void check_pair(const PointSet& d, const PointSet& e, int cap) {
  if (d.ambient() != e.ambient())
    throw DimensionError("degree-1 decision: ambient dimensions differ");
  if (static_cast<int>(d.size()) > cap && d.size() == e.size())
    throw CapacityError("degree-1 decision: point count exceeds bijection cap",
                        static_cast<long>(d.size()), cap);
}

DegreeOneMap fit_map(const linalg::SpanProjector& proj,
                     const std::vector<Vector>& values, int n) {
  DegreeOneMap map;
  map.ambient = n;
  const auto cv = constraint_vectors(values, n);
  for (int k = 0; k < n; ++k) map.coeffs.push_back(proj.coefficients(cv[static_cast<std::size_t>(k)]));
  return map;
}

Deg1Witness make_witness(const PointSet& d, const PointSet& e,
                         const std::vector<int>& h) {
  const linalg::SpanProjector pd(monomial_matrix(d));
  const linalg::SpanProjector pe(monomial_matrix(e));
  const auto inv = inverse_permutation(h);
  Deg1Witness w;
  w.bijection = h;
  w.forward = fit_map(pd, permuted(e, h), d.ambient());
  w.backward = fit_map(pe, permuted(d, inv), d.ambient());
  w.forward_residual = replay_error(w.forward, d, e, h);
  w.backward_residual = replay_error(w.backward, e, d, inv);
  return w;
}

double profile_mismatch(const std::vector<double>& pd, const std::vector<double>& pe,
                        const std::vector<int>& h, std::size_t m) {
  double s = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      s += std::abs(pd[a * m + b] - pe[static_cast<std::size_t>(h[a]) * m +
                                       static_cast<std::size_t>(h[b])]);
  return s;
}

std::vector<double> normalized_distances(const PointSet& d) {
  const std::size_t m = d.size();
  std::vector<double> out(m * m, 0.0);
  double mx = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      out[a * m + b] = (d[a] - d[b]).norm();
      mx = std::max(mx, out[a * m + b]);
    }
  if (mx > 0.0)
    for (double& x : out) x /= mx;
  return out;
}

}  // namespace

int default_cap(int ambient) { return ambient == 1 ? 8 : 6; }

std::vector<int> inverse_permutation(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    inv[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return inv;
}

Vector DegreeOneMap::evaluate(const Vector& z) const {
  if (z.size() != ambient) throw DimensionError("DegreeOneMap: point dimension");
  const Vector mono = monomials_at(z);
  Vector out(ambient);
  for (int k = 0; k < ambient; ++k)
    out(k) = coeffs[static_cast<std::size_t>(k)].transpose() * mono;
  return out;
}

Matrix monomial_matrix(const PointSet& d) {
  const int n = d.ambient();
  Matrix out(static_cast<Eigen::Index>(d.size()), (n + 1) * (n + 1));
  for (std::size_t r = 0; r < d.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = monomials_at(d[r]).transpose();
  return out;
}

std::optional<DegreeOneMap> is_degree_one_assignment(const PointSet& d,
                                                     const std::vector<Vector>& values,
                                                     double tol) {
  if (values.size() != d.size())
    throw DimensionError("is_degree_one_assignment: value count differs from point count");
  for (const auto& v : values)
    if (v.size() != d.ambient())
      throw DimensionError("is_degree_one_assignment: value dimension differs");
  const linalg::SpanProjector proj(monomial_matrix(d));
  if (!all_in_span(proj, constraint_vectors(values, d.ambient()), tol))
    return std::nullopt;
  return fit_map(proj, values, d.ambient());
}

double replay_error(const DegreeOneMap& map, const PointSet& from,
                    const PointSet& to, const std::vector<int>& bijection) {
  double worst = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i)
    worst = std::max(worst, (map.evaluate(from[i]) -
                             to[static_cast<std::size_t>(bijection[i])]).norm());
  return worst;
}

Deg1Decision degree_one_homeomorphic(const PointSet& d, const PointSet& e,
                                     const Deg1Options& opts) {
  const int cap = opts.cap > 0 ? opts.cap : default_cap(d.ambient());
  check_pair(d, e, cap);
  Deg1Decision out;
  if (d.size() != e.size()) {
    out.note = "point sets have different cardinalities";
    return out;
  }
  const int m = static_cast<int>(d.size());
  const int n = d.ambient();
  const linalg::SpanProjector pd(monomial_matrix(d));
  const linalg::SpanProjector pe(monomial_matrix(e));

  const long perms = factorial(m);
  const auto dd = normalized_distances(d);
  const auto de = normalized_distances(e);
  std::vector<std::pair<double, long>> order(static_cast<std::size_t>(perms));
  for (long k = 0; k < perms; ++k)
    order[static_cast<std::size_t>(k)] = {
        profile_mismatch(dd, de, nth_permutation(m, k), d.size()), k};
  std::sort(order.begin(), order.end());

  auto accepts = [&](const std::vector<int>& h) {
    return all_in_span(pd, constraint_vectors(permuted(e, h), n), opts.tol) &&
           all_in_span(pe, constraint_vectors(permuted(d, inverse_permutation(h)), n),
                       opts.tol);
  };
  const auto hit = find_first(order.size(), opts.jobs, [&](std::size_t idx) {
    return accepts(nth_permutation(m, order[idx].second));
  });
  out.tried = hit ? static_cast<long>(*hit) + 1 : perms;
  if (!hit) {
    out.note = "no bijection is degree 1 in both directions";
    return out;
  }
  out.homeomorphic = true;
  out.witness = make_witness(d, e, nth_permutation(m, order[*hit].second));
  out.note = "monomial span route";
  return out;
}

opsys::OperatorSystemSpan normal_system(const PointSet& d) {
  const int n = d.ambient();
  const auto m = static_cast<Eigen::Index>(d.size());
  std::vector<Matrix> coords;
  for (int k = 0; k < n; ++k) {
    Matrix v = Matrix::Zero(m, m);
    for (Eigen::Index r = 0; r < m; ++r) v(r, r) = d[static_cast<std::size_t>(r)](k);
    coords.push_back(std::move(v));
  }
  std::vector<Matrix> gens = coords;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gens.push_back(coords[static_cast<std::size_t>(i)] *
                     coords[static_cast<std::size_t>(j)].adjoint());
  return opsys::build_system(gens, true);
}

Deg1Decision deg1_via_opsys(const PointSet& d, const PointSet& e,
                            const Deg1Options& opts) {
  const int cap = opts.cap > 0 ? opts.cap : default_cap(d.ambient());
  check_pair(d, e, cap);
  Deg1Decision out;
  if (d.size() != e.size()) {
    out.note = "point sets have different cardinalities";
    return out;
  }
  const int m = static_cast<int>(d.size());
  const int n = d.ambient();

  // The system is an algebra of diagonal matrices; its elements are the
  // functions on the point set given by their diagonals.
  auto function_span = [](const opsys::OperatorSystemSpan& x) {
    Matrix cols(x.ambient_dim, x.dim());
    for (Eigen::Index j = 0; j < x.dim(); ++j)
      cols.col(j) = x.basis[static_cast<std::size_t>(j)].diagonal();
    return linalg::SpanProjector(cols);
  };
  const auto sd = function_span(normal_system(d));
  const auto se = function_span(normal_system(e));

  const long perms = factorial(m);
  const auto hit = find_first(static_cast<std::size_t>(perms), opts.jobs,
                              [&](std::size_t idx) {
    const auto h = nth_permutation(m, static_cast<long>(idx));
    return all_in_span(sd, constraint_vectors(permuted(e, h), n), opts.tol) &&
           all_in_span(se, constraint_vectors(permuted(d, inverse_permutation(h)), n),
                       opts.tol);
  });
  out.tried = hit ? static_cast<long>(*hit) + 1 : perms;
  if (!hit) {
    out.note = "no *-isomorphism of the envelopes maps one system onto the other";
    return out;
  }
  out.homeomorphic = true;
  out.witness = make_witness(d, e, nth_permutation(m, static_cast<long>(*hit)));
  out.note = "operator system route";
  return out;
}

}  // namespace osinv::degree1
