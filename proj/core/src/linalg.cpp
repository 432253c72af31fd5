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

#include "osinv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "osinv/error.hpp"

namespace osinv::linalg {

void require_valid(const Matrix& a, const char* what) {
  if (a.size() == 0) throw DimensionError(std::string(what) + ": empty matrix");
  if (!a.allFinite())
    throw InvalidInput(std::string(what) + ": non-finite entry");
}

namespace {

// Top eigenpair of the smaller Gram matrix; the square root of its eigenvalue
// is accurate to working precision relative to sigma_max.
SingularTriplet top_from_gram(const Matrix& a, bool vectors) {
  const bool tall = a.rows() >= a.cols();
  const Matrix gram = tall ? Matrix(a.adjoint() * a) : Matrix(a * a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      gram, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  const Eigen::Index top = gram.rows() - 1;
  SingularTriplet out;
  out.value = std::sqrt(std::max(es.eigenvalues()(top), 0.0));
  if (!vectors) return out;
  const Vector v = es.eigenvectors().col(top);
  Vector w = tall ? Vector(a * v) : Vector(a.adjoint() * v);
  if (out.value > 0.0) {
    w /= out.value;
  } else {
    w = Vector::Zero(tall ? a.rows() : a.cols());
    w(0) = 1.0;
  }
  out.left = tall ? w : v;
  out.right = tall ? v : w;
  return out;
}

}  // namespace

double op_norm(const Matrix& a) {
  require_valid(a, "op_norm");
  return top_from_gram(a, false).value;
}

SingularTriplet top_singular(const Matrix& a) {
  require_valid(a, "top_singular");
  return top_from_gram(a, true);
}

Eigen::VectorXd singular_values(const Matrix& a) {
  require_valid(a, "singular_values");
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

SpectralDecomposition eig_normal(const Matrix& a, double tol) {
  require_valid(a, "eig_normal");
  if (a.rows() != a.cols())
    throw DimensionError("eig_normal: matrix is not square");
  const double scale = op_norm(a);
  const Matrix ah = a.adjoint();
  const double commutator = (a * ah - ah * a).norm() == 0.0
                                ? 0.0
                                : op_norm(a * ah - ah * a);
  if (commutator > tol * scale * scale)
    throw NotNormalError("eig_normal: matrix is not normal", commutator);
  if (scale == 0.0)
    return {Vector::Zero(a.rows()), Matrix::Identity(a.rows(), a.cols())};

  Eigen::ComplexSchur<Matrix> schur(a);
  const Matrix& t = schur.matrixT();
  Matrix off = t.triangularView<Eigen::StrictlyUpper>();
  const double defect = off.norm();
  if (defect > tol * scale)
    throw NotNormalError("eig_normal: Schur factor is not diagonal", defect);
  return {t.diagonal(), schur.matrixU()};
}

namespace {

Matrix stack(std::span<const Vector> vectors, const char* what) {
  if (vectors.empty()) throw DimensionError(std::string(what) + ": no vectors");
  const Eigen::Index len = vectors.front().size();
  Matrix m(len, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != len)
      throw DimensionError(std::string(what) + ": vector length mismatch");
    m.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return m;
}

}  // namespace

std::optional<Vector> span_membership(const Vector& v,
                                      std::span<const Vector> basis,
                                      double tol) {
  const Matrix b = stack(basis, "span_membership");
  if (v.size() != b.rows())
    throw DimensionError("span_membership: vector length mismatch");
  SpanProjector proj(b);
  const double bound = tol * std::max(1.0, v.norm());
  if (proj.residual(v) > bound) return std::nullopt;
  return proj.coefficients(v);
}

int gram_rank(std::span<const Vector> vectors, double tol) {
  const Matrix m = stack(vectors, "gram_rank");
  const Eigen::VectorXd s = Eigen::JacobiSVD<Matrix>(m).singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

SpanProjector::SpanProjector(const Matrix& basis) : length_(basis.rows()) {
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff =
      s.size() == 0 ? 0.0
                    : s(0) * static_cast<double>(std::max(basis.rows(), basis.cols())) *
                          Eigen::NumTraits<double>::epsilon();
  rank_ = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) ++rank_;
  range_ = svd.matrixU().leftCols(rank_);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(rank_);
  for (int i = 0; i < rank_; ++i) inv(i) = 1.0 / s(i);
  pinv_ = svd.matrixV().leftCols(rank_) * inv.asDiagonal() *
          svd.matrixU().leftCols(rank_).adjoint();
}

double SpanProjector::residual(const Vector& v) const {
  if (rank_ == 0) return v.norm();
  return (v - range_ * (range_.adjoint() * v)).norm();
}

Vector SpanProjector::coefficients(const Vector& v) const { return pinv_ * v; }

Matrix random_gaussian(std::mt19937_64& rng, Eigen::Index rows,
                       Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix g = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mod = std::abs(r(j, j));
    if (mod > 0.0) q.col(j) *= r(j, j) / mod;
  }
  return q;
}

}  // namespace osinv::linalg
