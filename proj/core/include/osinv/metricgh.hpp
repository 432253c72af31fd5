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

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace osinv::metricgh {

// Name reserved for the metric; it is always a member of the first language.
inline constexpr const char* kMetric = "d";
inline constexpr double kSlack = 1e-12;
inline constexpr int kDefaultCap = 6;

struct RelationSymbol {
  std::string name;
  int arity = 1;
  double bound = 1.0;
  // Uniform continuity modulus, carried through but not interpreted.
  std::string modulus = "lipschitz:1";
};

struct Signature {
  std::vector<RelationSymbol> relations;  // without the metric
  // Increasing languages L_1, L_2, ...; an empty list means one language
  // containing every symbol.
  std::vector<std::vector<std::string>> languages;
  int domains = 1;

  void validate() const;
  // Language k (1-based), falling back to the last one past the end.
  std::vector<std::string> language(int k) const;
  const RelationSymbol* find(const std::string& name) const;
  bool compatible(const Signature& other) const;
};

struct RelationTable {
  int arity = 1;
  double bound = 1.0;
  std::vector<double> values;  // size m^arity, first argument most significant
};

class FiniteStructure {
 public:
  FiniteStructure(Eigen::MatrixXd metric, std::map<std::string, RelationTable> relations,
                  std::vector<std::vector<int>> domains,
                  std::vector<std::vector<std::string>> languages = {},
                  double tol = kSlack);

  int size() const { return static_cast<int>(metric_.rows()); }
  const Eigen::MatrixXd& metric() const { return metric_; }
  const Signature& signature() const { return signature_; }
  bool has_relation(const std::string& name) const;
  int arity(const std::string& name) const;
  double bound(const std::string& name) const;
  double relation(const std::string& name, std::span<const int> tuple) const;
  // Domain k (1-based); indices past the declared count give the last domain.
  const std::vector<int>& domain(int k) const;
  int domain_count() const { return static_cast<int>(domains_.size()); }
  const std::map<std::string, RelationTable>& relations() const { return relations_; }
  const std::vector<std::vector<int>>& domains() const { return domains_; }

  // Point i of this structure becomes point perm[i] of the result.
  FiniteStructure relabeled(const std::vector<int>& perm) const;

 private:
  Eigen::MatrixXd metric_;
  std::map<std::string, RelationTable> relations_;
  std::vector<std::vector<int>> domains_;
  Signature signature_;
};

// psi(x, y) for x in M, y in N.
using ApproxIsometry = Eigen::MatrixXd;

bool katetov_check(std::span<const double> f, const FiniteStructure& x,
                   double slack = kSlack);
bool is_approx_isometry(const ApproxIsometry& psi, const FiniteStructure& m,
                        const FiniteStructure& n, double slack = kSlack);
double eps_of_bijection(const ApproxIsometry& psi);

// Rows index tuples of M, columns tuples of N, both in base-size order.
ApproxIsometry lift_relation(const ApproxIsometry& psi, const std::string& relation,
                             const FiniteStructure& m, const FiniteStructure& n);

using Correspondence = std::vector<std::pair<int, int>>;

// Least Katetov-valid majorant taking the value eps on R.
ApproxIsometry extend_correspondence(const FiniteStructure& m, const FiniteStructure& n,
                                     const Correspondence& r, double eps);
// Smallest eps for which R induces a (D_k, L_k, eps)-approximate isomorphism;
// infinity when R is not a correspondence between the k-th domains.
double correspondence_eps(const FiniteStructure& m, const FiniteStructure& n, int k,
                          const Correspondence& r);

struct DkResult {
  int k = 1;
  double value = 0.0;
  Correspondence correspondence;
  std::uint64_t cliques = 0;
};

DkResult dk_bruteforce(const FiniteStructure& m, const FiniteStructure& n, int k,
                       int cap = kDefaultCap);

struct GhReport {
  double value = 0.0;
  std::vector<DkResult> levels;
};

GhReport dgh_report(const FiniteStructure& m, const FiniteStructure& n, int k_max,
                    int cap = kDefaultCap);
double dgh_structures(const FiniteStructure& m, const FiniteStructure& n, int k_max,
                      int cap = kDefaultCap);

}  // namespace osinv::metricgh
