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
#include <numeric>
#include <random>

#include "osinv/error.hpp"
#include "osinv/metricgh.hpp"
#include "osinv/random.hpp"

namespace {

using namespace osinv;
using namespace osinv::metricgh;
using Eigen::MatrixXd;

constexpr double kTol = 1e-12;

FiniteStructure space(const MatrixXd& d, std::vector<std::vector<int>> domains = {}) {
  return FiniteStructure(d, {}, std::move(domains));
}

MatrixXd two_point(double a) {
  MatrixXd d(2, 2);
  d << 0, a, a, 0;
  return d;
}

MatrixXd three_point(double a, double b, double c) {
  MatrixXd d(3, 3);
  d << 0, a, b, a, 0, c, b, c, 0;
  return d;
}

// Euclidean distances of random points in the plane, rounded to a grid so
// that coincidences (and hence exact isometries) are not excluded.
MatrixXd random_metric(std::mt19937_64& rng, int m) {
  std::uniform_int_distribution<int> coord(0, 3);
  std::vector<std::pair<double, double>> p;
  for (int i = 0; i < m; ++i) p.emplace_back(coord(rng), coord(rng));
  MatrixXd d(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      d(i, j) = std::hypot(p[i].first - p[j].first, p[i].second - p[j].second);
  return d;
}

FiniteStructure with_unary(const MatrixXd& d, std::vector<double> values) {
  std::map<std::string, RelationTable> rels;
  rels["P"] = RelationTable{1, 1.0, std::move(values)};
  return FiniteStructure(d, std::move(rels), {});
}

std::vector<int> tuple_of(std::size_t idx, int m, int arity) {
  std::vector<int> t(static_cast<std::size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(m));
    idx /= static_cast<std::size_t>(m);
  }
  return t;
}

std::vector<std::vector<int>> tuples_over(const std::vector<int>& dom, int arity) {
  std::vector<std::vector<int>> out{{}};
  for (int i = 0; i < arity; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& t : out)
      for (int x : dom) {
        auto u = t;
        u.push_back(x);
        next.push_back(u);
      }
    out = std::move(next);
  }
  return out;
}

bool scan_katetov(const std::vector<double>& f, const MatrixXd& d) {
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.rows(); ++j) {
      const double fi = f[static_cast<std::size_t>(i)], fj = f[static_cast<std::size_t>(j)];
      if (fi - fj > d(i, j) + kTol) return false;
      if (d(i, j) > fi + fj + kTol) return false;
    }
  return true;
}

// d_k straight from the definition: every full correspondence R between the
// k-th domains, psi = eps on R extended by the least majorant, psi separately
// Katetov, and every lifted table an eps-bijection on the k-th domain tuples.
double literal_dk(const FiniteStructure& m, const FiniteStructure& n, int k) {
  const auto& dm = m.domain(k);
  const auto& dn = n.domain(k);
  std::vector<std::string> names{"d"};
  for (const auto& [name, t] : m.relations()) names.push_back(name);
  std::vector<double> cand{0.0};
  for (const auto& name : names) {
    const int a = m.arity(name);
    for (const auto& xs : tuples_over(dm, a))
      for (const auto& ys : tuples_over(dn, a)) {
        const double gap = std::abs(m.relation(name, xs) - n.relation(name, ys));
        cand.push_back(gap);
        cand.push_back(0.5 * gap);
      }
  }
  std::sort(cand.begin(), cand.end());

  std::vector<std::pair<int, int>> cells;
  for (int x : dm)
    for (int y : dn) cells.emplace_back(x, y);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << cells.size()); ++mask) {
    std::vector<std::pair<int, int>> r;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (mask >> i & 1) r.push_back(cells[i]);
    bool full = true;
    for (int x : dm)
      full = full && std::any_of(r.begin(), r.end(), [&](auto p) { return p.first == x; });
    for (int y : dn)
      full = full && std::any_of(r.begin(), r.end(), [&](auto p) { return p.second == y; });
    if (!full) continue;
    for (double eps : cand) {
      if (eps >= best) break;
      MatrixXd psi(m.size(), n.size());
      for (int x = 0; x < m.size(); ++x)
        for (int y = 0; y < n.size(); ++y) {
          double v = std::numeric_limits<double>::infinity();
          for (auto [xp, yp] : r) v = std::min(v, eps + m.metric()(x, xp) + n.metric()(yp, y));
          psi(x, y) = v;
        }
      bool ok = true;
      for (int x = 0; ok && x < m.size(); ++x) {
        std::vector<double> row;
        for (int y = 0; y < n.size(); ++y) row.push_back(psi(x, y));
        ok = scan_katetov(row, n.metric());
      }
      for (int y = 0; ok && y < n.size(); ++y) {
        std::vector<double> col;
        for (int x = 0; x < m.size(); ++x) col.push_back(psi(x, y));
        ok = scan_katetov(col, m.metric());
      }
      for (const auto& name : names) {
        if (!ok) break;
        const int a = m.arity(name);
        const auto xt = tuples_over(dm, a);
        const auto yt = tuples_over(dn, a);
        auto lifted = [&](const std::vector<int>& xs, const std::vector<int>& ys) {
          double v = std::abs(m.relation(name, xs) - n.relation(name, ys));
          for (int i = 0; i < a; ++i) v = std::max(v, psi(xs[i], ys[i]));
          return v;
        };
        for (const auto& xs : xt) {
          double lo = std::numeric_limits<double>::infinity();
          for (const auto& ys : yt) lo = std::min(lo, lifted(xs, ys));
          ok = ok && lo <= eps + kTol;
        }
        for (const auto& ys : yt) {
          double lo = std::numeric_limits<double>::infinity();
          for (const auto& xs : xt) lo = std::min(lo, lifted(xs, ys));
          ok = ok && lo <= eps + kTol;
        }
      }
      if (ok) {
        best = eps;
        break;
      }
    }
  }
  return best;
}

bool exactly_isomorphic(const FiniteStructure& m, const FiniteStructure& n) {
  if (m.size() != n.size()) return false;
  std::vector<int> perm(static_cast<std::size_t>(m.size()));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; ok && i < m.size(); ++i)
      for (int j = 0; ok && j < m.size(); ++j)
        ok = std::abs(m.metric()(i, j) - n.metric()(perm[i], perm[j])) <= kTol;
    for (const auto& [name, t] : m.relations()) {
      if (!ok) break;
      const int a = t.arity;
      for (std::size_t idx = 0; ok && idx < t.values.size(); ++idx) {
        auto xs = tuple_of(idx, m.size(), a);
        auto ys = xs;
        for (auto& y : ys) y = perm[static_cast<std::size_t>(y)];
        ok = std::abs(m.relation(name, xs) - n.relation(name, ys)) <= kTol;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

TEST(Structure, ValidatesInput) {
  EXPECT_THROW(space(three_point(1, 1, 3)), InvalidInput);
  MatrixXd asym = two_point(1.0);
  asym(0, 1) = 2.0;
  EXPECT_THROW(space(asym), InvalidInput);
  EXPECT_THROW(with_unary(two_point(1.0), {0.5, 2.0}), InvalidInput);
  EXPECT_THROW(with_unary(two_point(1.0), {0.5}), InvalidInput);
  EXPECT_THROW(space(two_point(1.0), {{0}, {1}}), InvalidInput);
  EXPECT_NO_THROW(space(two_point(1.0), {{0}, {0, 1}}));
}

TEST(Structure, RelabelMovesTables) {
  const auto m = with_unary(three_point(1, 2, 2), {0.1, 0.2, 0.3});
  const auto r = m.relabeled({2, 0, 1});
  for (int i = 0; i < 3; ++i) {
    const int pi[] = {2, 0, 1};
    EXPECT_DOUBLE_EQ(r.relation("P", std::vector<int>{pi[i]}), m.relation("P", std::vector<int>{i}));
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(r.metric()(pi[i], pi[j]), m.metric()(i, j));
  }
}

TEST(Katetov, Examples) {
  const auto x = space(three_point(1, 2, 2));
  for (int x0 = 0; x0 < 3; ++x0) {
    std::vector<double> f;
    for (int i = 0; i < 3; ++i) f.push_back(x.metric()(i, x0));
    EXPECT_TRUE(katetov_check(f, x));
  }
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_FALSE(katetov_check(zero, space(two_point(1.0))));
  EXPECT_THROW(katetov_check(zero, x), DimensionError);
}

TEST(Katetov, PerturbationsMatchScan) {
  auto rng = split_stream(11, 0);
  std::uniform_real_distribution<double> noise(-0.3, 0.3);
  int accepted = 0, rejected = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = random_metric(rng, 4);
    const auto x = space(d);
    std::vector<double> f;
    for (int i = 0; i < 4; ++i) f.push_back(d(i, trial % 4) + noise(rng));
    const bool expect = scan_katetov(f, d);
    EXPECT_EQ(katetov_check(f, x), expect);
    (expect ? accepted : rejected)++;
  }
  EXPECT_GT(accepted, 0);
  EXPECT_GT(rejected, 0);
}

TEST(Bijection, Examples) {
  EXPECT_DOUBLE_EQ(eps_of_bijection(MatrixXd::Constant(3, 4, 0.7)), 0.7);
  const auto m = space(three_point(1, 2, 2));
  const auto psi = extend_correspondence(m, m, {{0, 0}, {1, 1}, {2, 2}}, 0.0);
  EXPECT_DOUBLE_EQ(eps_of_bijection(psi), 0.0);
  EXPECT_TRUE(is_approx_isometry(psi, m, m));
  EXPECT_THROW(eps_of_bijection(MatrixXd(0, 0)), DimensionError);
}

TEST(Bijection, RandomTablesMatchScan) {
  auto rng = split_stream(12, 0);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    MatrixXd psi(3, 4);
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = u(rng);
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
      double lo = 1e300;
      for (int j = 0; j < 4; ++j) lo = std::min(lo, psi(i, j));
      expect = std::max(expect, lo);
    }
    for (int j = 0; j < 4; ++j) {
      double lo = 1e300;
      for (int i = 0; i < 3; ++i) lo = std::min(lo, psi(i, j));
      expect = std::max(expect, lo);
    }
    EXPECT_EQ(eps_of_bijection(psi), expect);
  }
}

TEST(Extension, KatetovExactlyWhenDistortionFits) {
  auto rng = split_stream(13, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = space(random_metric(rng, 3));
    const auto n = space(random_metric(rng, 3));
    const Correspondence r{{0, 0}, {1, 1}, {2, 2}, {0, 1}};
    double half = 0.0;
    for (auto [x, y] : r)
      for (auto [xp, yp] : r)
        half = std::max(half, 0.5 * std::abs(m.metric()(x, xp) - n.metric()(y, yp)));
    EXPECT_TRUE(is_approx_isometry(extend_correspondence(m, n, r, half), m, n));
    if (half > 1e-3)
      EXPECT_FALSE(is_approx_isometry(extend_correspondence(m, n, r, half - 1e-3), m, n));
  }
}

TEST(Lift, IsomorphismGivesZeroOnMatchedTuples) {
  const auto m = with_unary(three_point(1, 2, 2), {0.1, 0.5, 0.9});
  const std::vector<int> perm{1, 2, 0};
  const auto n = m.relabeled(perm);
  Correspondence graph;
  for (int i = 0; i < 3; ++i) graph.emplace_back(i, perm[i]);
  const auto psi = extend_correspondence(m, n, graph, 0.0);
  for (const std::string name : {"d", "P"}) {
    const auto lifted = lift_relation(psi, name, m, n);
    EXPECT_DOUBLE_EQ(eps_of_bijection(lifted), 0.0);
    const int a = m.arity(name);
    for (Eigen::Index row = 0; row < lifted.rows(); ++row) {
      auto xs = tuple_of(static_cast<std::size_t>(row), 3, a);
      std::size_t col = 0;
      for (int x : xs) col = col * 3 + static_cast<std::size_t>(perm[x]);
      EXPECT_EQ(lifted(row, static_cast<Eigen::Index>(col)), 0.0);
    }
  }
}

TEST(Lift, UnaryGapIsVisible) {
  const auto m = with_unary(two_point(1.0), {0.2, 0.2});
  const auto n = with_unary(two_point(1.0), {0.7, 0.7});
  const auto psi = extend_correspondence(m, n, {{0, 0}, {1, 1}}, 0.0);
  const auto lifted = lift_relation(psi, "P", m, n);
  EXPECT_GE(lifted(0, 0), 0.5 - kTol);
  EXPECT_GE(lifted(1, 1), 0.5 - kTol);
  EXPECT_THROW(lift_relation(psi, "Q", m, n), InvalidInput);
}

TEST(Lift, RandomTableMatchesFormula) {
  auto rng = split_stream(14, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto m = with_unary(random_metric(rng, 3), {u(rng), u(rng), u(rng)});
  const auto n = with_unary(random_metric(rng, 4), {u(rng), u(rng), u(rng), u(rng)});
  MatrixXd psi(3, 4);
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = u(rng);
  for (const std::string name : {"d", "P"}) {
    const int a = m.arity(name);
    const auto lifted = lift_relation(psi, name, m, n);
    ASSERT_EQ(lifted.rows(), a == 1 ? 3 : 9);
    ASSERT_EQ(lifted.cols(), a == 1 ? 4 : 16);
    for (Eigen::Index row = 0; row < lifted.rows(); ++row)
      for (Eigen::Index col = 0; col < lifted.cols(); ++col) {
        const auto xs = tuple_of(static_cast<std::size_t>(row), 3, a);
        const auto ys = tuple_of(static_cast<std::size_t>(col), 4, a);
        double v = std::abs(m.relation(name, xs) - n.relation(name, ys));
        for (int i = 0; i < a; ++i) v = std::max(v, psi(xs[i], ys[i]));
        EXPECT_EQ(lifted(row, col), v);
      }
  }
}

TEST(Dk, SelfAndRelabeledAreZero) {
  auto rng = split_stream(15, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = with_unary(random_metric(rng, 4), {0.1, 0.4, 0.4, 0.8});
    EXPECT_EQ(dk_bruteforce(m, m, 1).value, 0.0);
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_LE(dk_bruteforce(m, m.relabeled(perm), 1).value, kTol);
    EXPECT_LE(dgh_structures(m, m.relabeled(perm), 3), kTol);
  }
}

TEST(Dk, TwoPointSpacesMatchLiteralSearch) {
  for (double a : {0.5, 1.0, 2.0, 3.5})
    for (double b : {0.5, 1.0, 2.0, 3.5}) {
      const auto m = space(two_point(a));
      const auto n = space(two_point(b));
      EXPECT_NEAR(dk_bruteforce(m, n, 1).value, literal_dk(m, n, 1), kTol) << a << " " << b;
    }
}

TEST(Dk, RandomStructuresMatchLiteralSearch) {
  auto rng = split_stream(16, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int sm = 2 + trial % 2, sn = 2 + (trial / 2) % 2;
    std::vector<double> pm, pn;
    for (int i = 0; i < sm; ++i) pm.push_back(std::round(4 * u(rng)) / 4);
    for (int i = 0; i < sn; ++i) pn.push_back(std::round(4 * u(rng)) / 4);
    const auto m = with_unary(random_metric(rng, sm), pm);
    const auto n = with_unary(random_metric(rng, sn), pn);
    const auto got = dk_bruteforce(m, n, 1);
    EXPECT_NEAR(got.value, literal_dk(m, n, 1), kTol);
    EXPECT_NEAR(correspondence_eps(m, n, 1, got.correspondence), got.value, kTol);
  }
}

TEST(Dk, DomainsAndCap) {
  MatrixXd d = MatrixXd::Constant(7, 7, 1.0);
  d.diagonal().setZero();
  const auto big = space(d, {{0, 1, 2}, {0, 1, 2, 3, 4, 5, 6}});
  EXPECT_EQ(dk_bruteforce(big, big, 1).value, 0.0);
  EXPECT_THROW(dk_bruteforce(big, big, 2), CapacityError);
  EXPECT_NO_THROW(dk_bruteforce(big, big, 2, 7));
  EXPECT_THROW(dk_bruteforce(big, big, 0), InvalidInput);
}

TEST(Dgh, WeightedSumOfLevels) {
  const auto m = space(three_point(1, 1, 1), {{0, 1}, {0, 1, 2}});
  const auto n = space(three_point(1, 2, 2), {{0, 1}, {0, 1, 2}});
  const double d1 = literal_dk(m, n, 1);
  const double d2 = literal_dk(m, n, 2);
  EXPECT_GT(d2, 0.0);
  const auto rep = dgh_report(m, n, 3);
  ASSERT_EQ(rep.levels.size(), 3u);
  EXPECT_NEAR(rep.levels[0].value, d1, kTol);
  EXPECT_NEAR(rep.levels[1].value, d2, kTol);
  EXPECT_NEAR(rep.value, d1 / 2 + d2 / 4 + d2 / 8, kTol);
  EXPECT_EQ(dgh_structures(m, n, 3), rep.value);
}

TEST(Dgh, ZeroExactlyForIsometricGridSpaces) {
  const double grid[] = {1.0, 1.5, 2.0};
  std::vector<FiniteStructure> spaces;
  for (double a : grid)
    for (double b : grid)
      for (double c : grid)
        if (a <= b + c && b <= a + c && c <= a + b) spaces.push_back(space(three_point(a, b, c)));
  int zeros = 0;
  for (const auto& m : spaces)
    for (const auto& n : spaces) {
      const double v = dgh_structures(m, n, 1);
      const bool iso = exactly_isomorphic(m, n);
      EXPECT_EQ(v <= kTol, iso);
      zeros += iso;
    }
  EXPECT_GT(zeros, static_cast<int>(spaces.size()));
}

TEST(Dgh, ZeroExactlyForIsomorphicRelationalStructures) {
  auto rng = split_stream(17, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const int size = 3 + trial % 2;
    std::vector<double> p;
    for (int i = 0; i < size; ++i) p.push_back((trial + i) % 3 == 0 ? 1.0 : 0.5);
    const auto m = with_unary(random_metric(rng, size), p);
    auto n = m;
    if (trial % 3 != 0) {
      std::vector<double> q;
      for (int i = 0; i < size; ++i) q.push_back(i % 2 ? 0.5 : 1.0);
      n = with_unary(random_metric(rng, size), q);
    } else {
      std::vector<int> perm(static_cast<std::size_t>(size));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      n = m.relabeled(perm);
    }
    EXPECT_EQ(dgh_structures(m, n, 2) <= kTol, exactly_isomorphic(m, n));
  }
}

TEST(Dgh, SymmetricAndTriangle) {
  auto rng = split_stream(18, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = space(random_metric(rng, 2 + trial % 3));
    const auto b = space(random_metric(rng, 2 + (trial + 1) % 3));
    const auto c = space(random_metric(rng, 2 + (trial + 2) % 3));
    const double ab = dgh_structures(a, b, 1), ba = dgh_structures(b, a, 1);
    const double bc = dgh_structures(b, c, 1), ac = dgh_structures(a, c, 1);
    EXPECT_EQ(ab, ba);
    EXPECT_LE(ac, ab + bc + 1e-9);
  }
}

TEST(Dgh, Errors) {
  const auto m = space(two_point(1.0));
  const auto n = with_unary(two_point(1.0), {0.0, 0.0});
  EXPECT_THROW(dgh_structures(m, n, 1), NotComparableError);
  EXPECT_THROW(dgh_structures(m, m, 0), InvalidInput);
}

}  // namespace
