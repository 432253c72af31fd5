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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "osinv/error.hpp"
#include "osinv/random.hpp"
#include "osinv/unitary.hpp"
#include "support.hpp"

namespace {

using namespace osinv;
using namespace osinv::testing;
using namespace osinv::unitary;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix four_u() { return diag({1.0, -1.0, Complex(0, 1), Complex(0, -1)}); }
Matrix four_v() {
  const double r = 1.0 / std::sqrt(2.0);
  return diag({1.0, Complex(r, r), Complex(0, 1), -1.0});
}

// Unitary with the given eigen-angles in a random basis.
Matrix unitary_with(const std::vector<double>& angles, std::mt19937_64& rng) {
  std::vector<Complex> d;
  for (double a : angles) d.push_back(unit(a));
  const Matrix q = linalg::random_unitary(rng, static_cast<Eigen::Index>(d.size()));
  return q * diag(d) * q.adjoint();
}

std::vector<double> random_angles(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  while (true) {
    std::vector<double> a;
    for (int i = 0; i < m; ++i) a.push_back(u(rng));
    std::sort(a.begin(), a.end());
    bool ok = a.back() - a.front() < kTwoPi - 0.05;
    for (std::size_t i = 1; i < a.size(); ++i) ok = ok && a[i] - a[i - 1] > 0.05;
    if (ok) return a;
  }
}

std::vector<double> moved(const std::vector<double>& a, double rot, bool reflect) {
  std::vector<double> out;
  for (double t : a) out.push_back(std::fmod((reflect ? -t : t) + rot + 4.0 * kTwoPi, kTwoPi));
  return out;
}

// Brute-force canonical gaps: minimum over all 2m rotations and reflections.
std::vector<double> brute_canonical(const std::vector<double>& angles) {
  auto s = angles;
  std::sort(s.begin(), s.end());
  const std::size_t m = s.size();
  std::vector<double> gaps(m);
  for (std::size_t i = 0; i < m; ++i)
    gaps[i] = i + 1 < m ? s[i + 1] - s[i] : s[0] + kTwoPi - s[i];
  std::vector<double> best;
  auto lex_less = [](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i] - 1e-9) return true;
      if (a[i] > b[i] + 1e-9) return false;
    }
    return false;
  };
  for (int refl = 0; refl < 2; ++refl) {
    auto g = gaps;
    if (refl) std::reverse(g.begin(), g.end());
    for (std::size_t r = 0; r < m; ++r) {
      std::vector<double> cand(g.begin() + static_cast<long>(r), g.end());
      cand.insert(cand.end(), g.begin(), g.begin() + static_cast<long>(r));
      if (best.empty() || lex_less(cand, best)) best = cand;
    }
  }
  return best;
}

double max_gap_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return 1e9;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TEST(Spectrum, FourPointExample) {
  const auto s = spectrum(four_u());
  ASSERT_EQ(s.size(), 4u);
  const double want[] = {0.0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.angles()[static_cast<std::size_t>(i)], want[i], 1e-12);
}

TEST(Spectrum, MultiplicityCollapses) {
  const auto s = spectrum(Matrix::Identity(5, 5));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.angles()[0], 0.0, 1e-14);
}

TEST(Spectrum, MatchesEigOracle) {
  auto rng = split_stream(31, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix u = linalg::random_unitary(rng, 6);
    const auto s = spectrum(u);
    const auto d = linalg::eig_normal(u);
    std::vector<double> want;
    for (Eigen::Index j = 0; j < d.eigenvalues.size(); ++j) {
      double a = std::arg(d.eigenvalues(j));
      if (a < 0) a += kTwoPi;
      want.push_back(a);
    }
    std::sort(want.begin(), want.end());
    ASSERT_EQ(s.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(s.angles()[i], want[i], 1e-8);
  }
}

TEST(Spectrum, RejectsNonUnitary) {
  try {
    spectrum(2.0 * Matrix::Identity(2, 2));
    FAIL();
  } catch (const NotUnitaryError& e) {
    EXPECT_NEAR(e.defect(), 3.0, 1e-12);
  }
}

TEST(CircleSet, WrapAroundDedup) {
  const auto s = CircleSet::from_angles({kTwoPi - 1e-10, 1e-10, 1.0});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_THROW(CircleSet::from_angles({}), InvalidInput);
}

TEST(CanonicalForm, SinglePoint) {
  const auto c = canonical_form(CircleSet::from_angles({2.3}));
  ASSERT_EQ(c.gaps.size(), 1u);
  EXPECT_NEAR(c.gaps[0], kTwoPi, 1e-12);
}

TEST(CanonicalForm, FixedExample) {
  const std::vector<double> s{0.0, 0.7, 1.1, 3.0, 4.2};
  const auto cs = canonical_form(CircleSet::from_angles(s));
  const auto cr = canonical_form(CircleSet::from_angles(moved(s, 0.0, true)));
  EXPECT_TRUE(same_necklace(cs, cr));
  EXPECT_LE(max_gap_diff(cs.gaps, brute_canonical(s)), 1e-12);
  const auto other = canonical_form(CircleSet::from_angles({0.0, 0.7, 1.1, 3.0, 4.3}));
  EXPECT_FALSE(same_necklace(cs, other));
}

TEST(CanonicalForm, MatchesBruteForceAndSumsToTwoPi) {
  auto rng = split_stream(32, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_angles(rng, 3 + trial % 7);
    const auto c = canonical_form(CircleSet::from_angles(a));
    double sum = 0.0;
    for (double g : c.gaps) sum += g;
    EXPECT_NEAR(sum, kTwoPi, 1e-12);
    EXPECT_LE(max_gap_diff(c.gaps, brute_canonical(a)), 1e-12);
  }
}

TEST(CanonicalForm, RotationInvariance) {
  auto rng = split_stream(33, 0);
  std::uniform_real_distribution<double> rot(0.0, kTwoPi);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_angles(rng, 3 + trial % 7);
    const auto c = canonical_form(CircleSet::from_angles(a));
    const auto d = canonical_form(CircleSet::from_angles(moved(a, rot(rng), trial % 2 == 1)));
    EXPECT_LE(max_gap_diff(c.gaps, d.gaps), 1e-9);
  }
}

TEST(LeastRotation, Booth) {
  EXPECT_EQ(least_rotation({3, 1, 2}), 1u);
  EXPECT_EQ(least_rotation({1, 1, 1}), 0u);
  EXPECT_EQ(least_rotation({2, 1, 2, 1, 1}), 3u);
}

TEST(RigidEquivalent, Examples) {
  const std::vector<double> a{0.2, 1.0, 2.5, 4.0, 5.5};
  const auto s = CircleSet::from_angles(a);
  auto g = rigid_equivalent(s, s);
  ASSERT_TRUE(g.has_value());
  EXPECT_FALSE(g->reflect);
  EXPECT_NEAR(g->rotation, 0.0, 1e-12);
  g = rigid_equivalent(s, CircleSet::from_angles(moved(a, 0.0, true)));
  ASSERT_TRUE(g.has_value());
  EXPECT_TRUE(g->reflect);
  EXPECT_NEAR(std::min(g->rotation, kTwoPi - g->rotation), 0.0, 1e-12);
  EXPECT_FALSE(rigid_equivalent(s, CircleSet::from_angles({0.0, 1.0})).has_value());
}

TEST(RigidEquivalent, AgreesWithCanonicalEquality) {
  auto rng = split_stream(34, 0);
  std::uniform_real_distribution<double> rot(0.0, kTwoPi);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + trial % 5;
    const auto a = random_angles(rng, m);
    const auto b = trial % 2 == 0 ? moved(a, rot(rng), trial % 4 == 0) : random_angles(rng, m);
    const auto s = CircleSet::from_angles(a);
    const auto t = CircleSet::from_angles(b);
    double res = -1.0;
    const auto g = rigid_equivalent(s, t, kAngleTol, &res);
    EXPECT_EQ(g.has_value(), same_necklace(canonical_form(s), canonical_form(t)));
    if (g) {
      std::vector<double> img;
      for (double x : t.angles()) img.push_back(g->apply_angle(x));
      std::sort(img.begin(), img.end());
      EXPECT_LE(hausdorff_angle(img, s.angles()), 1e-8);
    }
    EXPECT_EQ(g.has_value(), trial % 2 == 0);
  }
}

TEST(Theorem, Examples) {
  auto rng = split_stream(35, 0);
  const Matrix u = unitary_with({0.1, 0.9, 2.0, 3.3, 5.0}, rng);
  const auto d = cois_unitary_theorem(u, unit(1.234) * u);
  EXPECT_EQ(d.verdict, Verdict::Isomorphic);
  ASSERT_TRUE(d.motion.has_value());
  EXPECT_EQ(cois_unitary_theorem(diag({1.0, -1.0}), diag({1.0, Complex(0, 1), -1.0})).verdict,
            Verdict::NotIsomorphic);
  EXPECT_EQ(cois_unitary_theorem(diag({1.0, -1.0, Complex(0, 1)}), diag({1.0, 0.6 + Complex(0, 0.8), -1.0})).verdict,
            Verdict::Isomorphic);
  const auto p = cois_unitary_theorem(four_u(), four_v());
  EXPECT_EQ(p.verdict, Verdict::Unknown);
  EXPECT_THROW(cois_unitary_theorem(2.0 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
               NotUnitaryError);
}

TEST(Oracle, FourPointPair) {
  const auto d = cois_unitary_oracle(four_u(), four_v());
  EXPECT_EQ(d.verdict, Verdict::NotIsomorphic);
  EXPECT_EQ(d.method, Method::Oracle);
  ASSERT_TRUE(d.exhaustion.has_value());
  EXPECT_EQ(d.exhaustion->tried, 24);
  EXPECT_EQ(d.exhaustion->failures.size(), 24u);
}

TEST(Oracle, ReflectedSixPoint) {
  auto rng = split_stream(36, 0);
  const Matrix u = unitary_with(random_angles(rng, 6), rng);
  const Complex lambda = unit(0.77);
  const auto d = cois_unitary_oracle(u, lambda * u.adjoint());
  ASSERT_EQ(d.verdict, Verdict::Isomorphic);
  ASSERT_TRUE(d.bijection.has_value());
  // Replay the certificate: target values from (1, z, conj z) on the source.
  const auto src = d.source.points();
  const auto tgt = d.target.points();
  const auto& c = d.bijection->forward_coeffs;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Complex z = src[i];
    const Complex img = c(0) + c(1) * z + c(2) * std::conj(z);
    EXPECT_LE(std::abs(img - tgt[static_cast<std::size_t>(d.bijection->bijection[i])]), 1e-8);
  }
  const auto& b = d.bijection->backward_coeffs;
  EXPECT_TRUE(validate_unitary_image(b(0), b(1), b(2), 1e-8));
}

TEST(Oracle, SmallSpectraFollowCardinality) {
  auto rng = split_stream(37, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 3;
    const auto d = cois_unitary_oracle(unitary_with(random_angles(rng, m), rng),
                                       unitary_with(random_angles(rng, m), rng));
    EXPECT_EQ(d.verdict, Verdict::Isomorphic);
  }
  const auto d = cois_unitary_oracle(diag({1.0, -1.0}), diag({1.0, Complex(0, 1), -1.0}));
  EXPECT_EQ(d.verdict, Verdict::NotIsomorphic);
}

TEST(Oracle, AgreesWithTheoremOnFivePoints) {
  auto rng = split_stream(38, 0);
  std::uniform_real_distribution<double> rot(0.0, kTwoPi);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_angles(rng, 5);
    const auto b = trial % 2 == 0 ? moved(a, rot(rng), trial % 4 == 0) : random_angles(rng, 5);
    const Matrix u = unitary_with(a, rng);
    const Matrix v = unitary_with(b, rng);
    const auto t = cois_unitary_theorem(u, v);
    const auto o = cois_unitary_oracle(u, v);
    EXPECT_EQ(t.verdict, o.verdict) << "trial " << trial;
    EXPECT_EQ(t.verdict == Verdict::Isomorphic, trial % 2 == 0);
  }
}

TEST(Oracle, CapacityAndDeterminism) {
  auto rng = split_stream(39, 0);
  const Matrix u = unitary_with(random_angles(rng, 10), rng);
  const Matrix v = unitary_with(random_angles(rng, 10), rng);
  EXPECT_THROW(cois_unitary_oracle(u, v), CapacityError);
  const Matrix a = unitary_with(random_angles(rng, 6), rng);
  const Matrix b = unitary_with(random_angles(rng, 6), rng);
  OracleOptions o1, o4;
  o4.jobs = 4;
  const auto d1 = cois_unitary_oracle(a, b, o1);
  const auto d4 = cois_unitary_oracle(a, b, o4);
  EXPECT_EQ(d1.verdict, d4.verdict);
  ASSERT_TRUE(d1.exhaustion && d4.exhaustion);
  EXPECT_EQ(d1.exhaustion->tried, d4.exhaustion->tried);
  EXPECT_EQ(d1.exhaustion->min_blocking, d4.exhaustion->min_blocking);
}

TEST(ValidateUnitaryImage, Examples) {
  EXPECT_TRUE(validate_unitary_image(0.0, unit(0.3), 0.0));
  EXPECT_TRUE(validate_unitary_image(0.0, 0.0, unit(2.0)));
  EXPECT_FALSE(validate_unitary_image(0.0, 0.6, 0.8));
  EXPECT_FALSE(validate_unitary_image(0.5, unit(0.3), 0.0));
}

TEST(FourPoint, DeterminantIdentity) {
  const auto rep = four_point_obstruction(four_u(), four_v());
  ASSERT_EQ(rep.determinants.size(), 24u);
  EXPECT_TRUE(rep.all_nonzero);
  EXPECT_GT(rep.min_modulus, 0.1);
  const auto pts = spectrum(four_u()).points();
  const double r2 = std::sqrt(2.0);
  for (std::size_t k = 0; k < 24; ++k) {
    const auto& p = rep.assignments[k];
    const Complex a = pts[static_cast<std::size_t>(p[0])], b = pts[static_cast<std::size_t>(p[1])];
    const Complex c = pts[static_cast<std::size_t>(p[2])], d = pts[static_cast<std::size_t>(p[3])];
    const Complex want = Complex(0, 2) * (-a + 2.0 * b - r2 * c + (r2 - 1.0) * d);
    EXPECT_LE(std::abs(rep.determinants[k] - want), 1e-12);
  }
}

TEST(FourPoint, EqualSpectraIdentityIsSingular) {
  const auto rep = four_point_obstruction(four_v(), four_v());
  EXPECT_LE(std::abs(rep.determinants[0]), 1e-12);
  EXPECT_FALSE(rep.all_nonzero);
  EXPECT_THROW(four_point_obstruction(diag({1.0, -1.0}), four_v()), DimensionError);
}

TEST(FourPoint, NonzeroImpliesOracleNegative) {
  auto rng = split_stream(40, 0);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix u = unitary_with(random_angles(rng, 4), rng);
    const Matrix v = unitary_with(random_angles(rng, 4), rng);
    if (!four_point_obstruction(u, v).all_nonzero) continue;
    ++checked;
    EXPECT_EQ(cois_unitary_oracle(u, v).verdict, Verdict::NotIsomorphic);
  }
  EXPECT_GT(checked, 10);
}

TEST(Permutations, RankOrder) {
  EXPECT_EQ(factorial(5), 120);
  EXPECT_EQ(nth_permutation(3, 0), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(nth_permutation(3, 5), (std::vector<int>{2, 1, 0}));
  std::vector<int> p{0, 1, 2, 3};
  for (long k = 0; k < 24; ++k) {
    EXPECT_EQ(nth_permutation(4, k), p);
    std::next_permutation(p.begin(), p.end());
  }
}

}  // namespace
