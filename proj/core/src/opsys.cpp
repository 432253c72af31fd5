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

#include "osinv/opsys.hpp"

#include <algorithm>
#include <cmath>

#include "osinv/error.hpp"

namespace osinv::opsys {

using linalg::gram_rank;
using linalg::op_norm;
using linalg::vec;

Matrix OperatorSystemSpan::element(const Vector& coeffs) const {
  if (coeffs.size() != dim())
    throw DimensionError("element: coefficient length does not match basis");
  Matrix out = Matrix::Zero(ambient_dim, ambient_dim);
  for (Eigen::Index m = 0; m < dim(); ++m)
    out += coeffs(m) * basis[static_cast<std::size_t>(m)];
  return out;
}

std::vector<Vector> OperatorSystemSpan::vectorized() const {
  std::vector<Vector> out;
  out.reserve(basis.size());
  for (const auto& b : basis) out.push_back(vec(b));
  return out;
}

Vector OperatorSystemSpan::coordinates(const Matrix& x, double tol) const {
  if (x.rows() != ambient_dim || x.cols() != ambient_dim)
    throw DimensionError("coordinates: matrix size differs from ambient size");
  const auto v = vectorized();
  auto c = linalg::span_membership(vec(x), v, tol);
  if (!c) throw InvalidInput("coordinates: matrix is not in the system");
  return *c;
}

AmplifiedElement::AmplifiedElement(int n, Eigen::Index dim)
    : level(n), coeffs(static_cast<std::size_t>(n * n), Vector::Zero(dim)) {}

namespace {

void require_square_family(const std::vector<Matrix>& ms, const char* what) {
  if (ms.empty()) return;
  const Eigen::Index k = ms.front().rows();
  for (const auto& m : ms) {
    linalg::require_valid(m, what);
    if (m.rows() != m.cols() || m.rows() != k)
      throw DimensionError(std::string(what) +
                           ": matrices must be square of equal size");
  }
}

bool in_span(const Matrix& x, const std::vector<Vector>& basis, double tol) {
  if (basis.empty()) return x.norm() <= tol;
  return linalg::span_membership(vec(x), basis, tol).has_value();
}

double separation_of(const std::vector<Vector>& vs) {
  if (vs.empty()) return 0.0;
  Matrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j)
    m.col(static_cast<Eigen::Index>(j)) = vs[j];
  const Eigen::VectorXd s = linalg::singular_values(m);
  if (s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

}  // namespace

Vector find_unit_coeffs(const std::vector<Matrix>& basis, double tol) {
  if (basis.empty()) throw NoUnitError("find_unit_coeffs: empty basis");
  require_square_family(basis, "find_unit_coeffs");
  const Eigen::Index k = basis.front().rows();
  std::vector<Vector> vs;
  for (const auto& b : basis) vs.push_back(vec(b));
  auto c = linalg::span_membership(vec(Matrix::Identity(k, k)), vs, tol);
  if (!c) throw NoUnitError("find_unit_coeffs: identity is not in the span");
  return *c;
}

OperatorSystemSpan build_system(const std::vector<Matrix>& generators,
                                bool include_identity, double tol) {
  if (generators.empty() && !include_identity)
    throw EmptySystemError("build_system: no generators and no identity");
  require_square_family(generators, "build_system");
  const Eigen::Index k = generators.empty() ? 1 : generators.front().rows();
  const Matrix id = Matrix::Identity(k, k);

  std::vector<Matrix> candidates;
  for (const auto& g : generators) {
    candidates.push_back(g);
    candidates.push_back(g.adjoint());
  }

  std::vector<Vector> all;
  for (const auto& c : candidates) all.push_back(vec(c));
  const bool identity_in_span =
      include_identity || (!all.empty() && in_span(id, all, tol));
  if (identity_in_span) candidates.insert(candidates.begin(), id);

  std::vector<Matrix> basis;
  std::vector<Vector> chosen;
  int rank = 0;
  for (const auto& c : candidates) {
    chosen.push_back(vec(c));
    const int r = gram_rank(chosen, tol);
    if (r > rank) {
      rank = r;
      basis.push_back(c);
    } else {
      chosen.pop_back();
    }
  }
  if (basis.empty()) throw EmptySystemError("build_system: zero span");
  if (!identity_in_span)
    throw NoUnitError("build_system: identity is not in the generated span");

  OperatorSystemSpan out;
  out.ambient_dim = k;
  out.unit_coeffs = find_unit_coeffs(basis, tol);
  out.basis = std::move(basis);
  return out;
}

SystemCheck is_operator_system(const std::vector<Matrix>& tuple, double tol) {
  SystemCheck res;
  if (tuple.empty()) {
    res.failed = "identity";
    res.detail = "empty tuple";
    return res;
  }
  require_square_family(tuple, "is_operator_system");
  const Eigen::Index k = tuple.front().rows();
  std::vector<Vector> vs;
  for (const auto& t : tuple) vs.push_back(vec(t));
  res.separation = separation_of(vs);

  if (!in_span(Matrix::Identity(k, k), vs, tol)) {
    res.failed = "identity";
    res.detail = "identity is not in the span";
    return res;
  }
  for (std::size_t j = 0; j < tuple.size(); ++j) {
    if (!in_span(tuple[j].adjoint(), vs, tol)) {
      res.failed = "adjoint";
      res.detail = "adjoint of element " + std::to_string(j) + " is not in the span";
      return res;
    }
  }
  if (gram_rank(vs, tol) != static_cast<int>(tuple.size())) {
    res.failed = "independence";
    res.detail = "tuple is linearly dependent";
    return res;
  }
  res.ok = true;
  return res;
}

OperatorSystemSpan from_basis(std::vector<Matrix> basis, double tol) {
  const SystemCheck check = is_operator_system(basis, tol);
  if (!check.ok) {
    if (check.failed == "identity") throw NoUnitError("from_basis: " + check.detail);
    throw InvalidInput("from_basis: " + check.detail);
  }
  OperatorSystemSpan out;
  out.ambient_dim = basis.front().rows();
  out.unit_coeffs = find_unit_coeffs(basis, tol);
  out.basis = std::move(basis);
  return out;
}

Matrix assemble(const OperatorSystemSpan& x, const AmplifiedElement& a) {
  const int n = a.level;
  if (n < 1 || a.coeffs.size() != static_cast<std::size_t>(n * n))
    throw DimensionError("assemble: malformed amplified element");
  const Eigen::Index k = x.ambient_dim;
  Matrix out(n * k, n * k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block(i * k, j * k, k, k) = x.element(a.at(i, j));
  return out;
}

double amplified_norm(const OperatorSystemSpan& x, const AmplifiedElement& a) {
  return op_norm(assemble(x, a));
}

AmplifiedElement unit_element(const OperatorSystemSpan& x, int level) {
  AmplifiedElement a(level, x.dim());
  for (int i = 0; i < level; ++i) a.at(i, i) = x.unit_coeffs;
  return a;
}

double min_os_norm(const PolyhedralDualBall& ball,
                   const std::vector<Vector>& entries) {
  if (ball.functionals.empty())
    throw InvalidInput("min_os_norm: empty functional list");
  const auto n = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(entries.size()))));
  if (n < 1 || static_cast<std::size_t>(n * n) != entries.size())
    throw DimensionError("min_os_norm: entries must form an n x n array");
  for (const auto& e : entries)
    if (e.size() != ball.dim)
      throw DimensionError("min_os_norm: entry dimension differs from ball");
  for (const auto& f : ball.functionals) {
    if (f.size() != ball.dim)
      throw DimensionError("min_os_norm: functional dimension differs from ball");
    if (f.norm() == 0.0)
      throw InvalidInput("min_os_norm: functional is identically zero");
  }

  double best = 0.0;
  Matrix scalars(n, n);
  for (const auto& phi : ball.functionals) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        scalars(i, j) = phi.transpose() * entries[static_cast<std::size_t>(i * n + j)];
    best = std::max(best, op_norm(scalars));
  }
  return best;
}

}  // namespace osinv::opsys
