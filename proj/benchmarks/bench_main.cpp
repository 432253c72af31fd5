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

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "osinv/degree1.hpp"
#include "osinv/metricgh.hpp"
#include "osinv/osdist.hpp"
#include "osinv/random.hpp"
#include "osinv/unitary.hpp"

namespace {

using namespace osinv;

std::vector<double> angles(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> a;
  for (int i = 0; i < m; ++i) a.push_back(u(rng));
  return a;
}

void BM_CanonicalForm(benchmark::State& state) {
  auto rng = split_stream(1, 0);
  const auto s = unitary::CircleSet::from_angles(angles(rng, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(unitary::canonical_form(s));
}
BENCHMARK(BM_CanonicalForm)->Arg(8)->Arg(64)->Arg(512);

void BM_SpectraOracle(benchmark::State& state) {
  auto rng = split_stream(2, 0);
  const int m = static_cast<int>(state.range(0));
  const auto a = unitary::CircleSet::from_angles(angles(rng, m));
  const auto b = unitary::CircleSet::from_angles(angles(rng, m));
  for (auto _ : state) benchmark::DoNotOptimize(unitary::cois_spectra_oracle(a, b));
}
BENCHMARK(BM_SpectraOracle)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_DegreeOne(benchmark::State& state) {
  auto rng = split_stream(3, 0);
  std::normal_distribution<double> g;
  std::vector<linalg::Complex> zs, ws;
  for (int i = 0; i < state.range(0); ++i) {
    zs.emplace_back(g(rng), g(rng));
    ws.emplace_back(g(rng), g(rng));
  }
  const auto d = degree1::PointSet::from_scalars(zs);
  const auto e = degree1::PointSet::from_scalars(ws);
  for (auto _ : state) benchmark::DoNotOptimize(degree1::degree_one_homeomorphic(d, e));
}
BENCHMARK(BM_DegreeOne)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_MapNorm(benchmark::State& state) {
  auto rng = split_stream(4, 0);
  const auto x = opsys::build_system({linalg::random_gaussian(rng, 3, 3)});
  const auto y = opsys::build_system({linalg::random_gaussian(rng, 3, 3)});
  const auto u = osdist::LinearMapCoords::from(linalg::random_gaussian(rng, 3, 3));
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(osdist::amplified_map_norm(x, y, u, level));
}
BENCHMARK(BM_MapNorm)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Dk(benchmark::State& state) {
  auto rng = split_stream(5, 0);
  const int m = static_cast<int>(state.range(0));
  auto make = [&] {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<double, double>> p;
    for (int i = 0; i < m; ++i) p.emplace_back(u(rng), u(rng));
    Eigen::MatrixXd d(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) d(i, j) = std::hypot(p[i].first - p[j].first, p[i].second - p[j].second);
    return metricgh::FiniteStructure(d, {}, {});
  };
  const auto a = make();
  const auto b = make();
  for (auto _ : state) benchmark::DoNotOptimize(metricgh::dk_bruteforce(a, b, 1));
}
BENCHMARK(BM_Dk)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
