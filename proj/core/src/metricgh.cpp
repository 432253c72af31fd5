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

#include "osinv/metricgh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "osinv/error.hpp"

namespace osinv::metricgh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t ipow(std::size_t base, int e) {
  std::size_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

// Calls fn for every tuple over the given points, in lexicographic order.
void for_each_tuple(const std::vector<int>& points, int arity,
                    const std::function<void(const std::vector<int>&)>& fn) {
  if (points.empty()) return;
  std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
  std::vector<int> tuple(static_cast<std::size_t>(arity), points.front());
  while (true) {
    fn(tuple);
    int pos = arity - 1;
    while (pos >= 0) {
      auto p = static_cast<std::size_t>(pos);
      if (++idx[p] < points.size()) {
        tuple[p] = points[idx[p]];
        break;
      }
      idx[p] = 0;
      tuple[p] = points.front();
      --pos;
    }
    if (pos < 0) return;
  }
}

std::vector<int> iota_points(int m) {
  std::vector<int> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

std::vector<std::string> all_names(const Signature& sig) {
  std::vector<std::string> out{kMetric};
  for (const auto& r : sig.relations) out.push_back(r.name);
  return out;
}

void require_compatible(const FiniteStructure& m, const FiniteStructure& n) {
  if (!m.signature().compatible(n.signature()))
    throw NotComparableError("structures have different signatures");
}

// Worst-case miss of relation B over tuples of 'from', matched through 'rel'.
double relation_gap(const FiniteStructure& from, const FiniteStructure& to,
                    const std::string& name, const std::vector<int>& dom,
                    const std::vector<std::vector<int>>& rel) {
  const int arity = from.arity(name);
  double worst = 0.0;
  std::vector<int> image(static_cast<std::size_t>(arity));
  for_each_tuple(dom, arity, [&](const std::vector<int>& xs) {
    const double bx = from.relation(name, xs);
    double best = kInf;
    std::function<void(int)> rec = [&](int pos) {
      if (best == 0.0) return;
      if (pos == arity) {
        best = std::min(best, std::abs(bx - to.relation(name, image)));
        return;
      }
      for (int y : rel[static_cast<std::size_t>(xs[static_cast<std::size_t>(pos)])]) {
        image[static_cast<std::size_t>(pos)] = y;
        rec(pos + 1);
      }
    };
    rec(0);
    worst = std::max(worst, best);
  });
  return worst;
}

}  // namespace

void Signature::validate() const {
  std::set<std::string> names{kMetric};
  for (const auto& r : relations) {
    if (r.name.empty() || r.name == kMetric)
      throw InvalidInput("signature: invalid relation name '" + r.name + "'");
    if (!names.insert(r.name).second)
      throw InvalidInput("signature: duplicate relation '" + r.name + "'");
    if (r.arity < 1) throw InvalidInput("signature: arity must be >= 1 for " + r.name);
    if (!(r.bound >= 0.0) || !std::isfinite(r.bound))
      throw InvalidInput("signature: bad bound for " + r.name);
  }
  if (domains < 1) throw InvalidInput("signature: at least one domain is required");
  std::set<std::string> prev;
  for (std::size_t k = 0; k < languages.size(); ++k) {
    std::set<std::string> cur(languages[k].begin(), languages[k].end());
    for (const auto& s : cur)
      if (!names.count(s)) throw InvalidInput("signature: unknown symbol '" + s + "' in language");
    if (k == 0 && !cur.count(kMetric))
      throw InvalidInput("signature: the metric must belong to the first language");
    if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()))
      throw InvalidInput("signature: languages must be increasing");
    prev = std::move(cur);
  }
}

std::vector<std::string> Signature::language(int k) const {
  if (languages.empty()) return all_names(*this);
  const auto idx = static_cast<std::size_t>(std::clamp(k, 1, static_cast<int>(languages.size())) - 1);
  std::vector<std::string> out = languages[idx];
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const RelationSymbol* Signature::find(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return &r;
  return nullptr;
}

bool Signature::compatible(const Signature& other) const {
  if (relations.size() != other.relations.size()) return false;
  for (const auto& r : relations) {
    const auto* o = other.find(r.name);
    if (!o || o->arity != r.arity) return false;
  }
  const std::size_t levels = std::max({languages.size(), other.languages.size(), std::size_t{1}});
  for (std::size_t k = 1; k <= levels; ++k)
    if (language(static_cast<int>(k)) != other.language(static_cast<int>(k))) return false;
  return true;
}

FiniteStructure::FiniteStructure(Eigen::MatrixXd metric,
                                 std::map<std::string, RelationTable> relations,
                                 std::vector<std::vector<int>> domains,
                                 std::vector<std::vector<std::string>> languages, double tol)
    : metric_(std::move(metric)), relations_(std::move(relations)), domains_(std::move(domains)) {
  const auto m = metric_.rows();
  if (m < 1 || metric_.cols() != m) throw InvalidInput("structure: metric must be square and nonempty");
  if (!metric_.allFinite()) throw InvalidInput("structure: metric has non-finite entries");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(metric_(i, i)) > tol) throw InvalidInput("structure: metric diagonal must vanish");
    for (Eigen::Index j = 0; j < m; ++j) {
      if (metric_(i, j) < -tol) throw InvalidInput("structure: metric must be nonnegative");
      if (std::abs(metric_(i, j) - metric_(j, i)) > tol)
        throw InvalidInput("structure: metric must be symmetric");
      for (Eigen::Index l = 0; l < m; ++l)
        if (metric_(i, l) > metric_(i, j) + metric_(j, l) + tol)
          throw InvalidInput("structure: metric violates the triangle inequality");
    }
  }
  for (const auto& [name, table] : relations_) {
    if (table.arity < 1) throw InvalidInput("structure: arity must be >= 1 for " + name);
    if (table.values.size() != ipow(static_cast<std::size_t>(m), table.arity))
      throw InvalidInput("structure: relation " + name + " needs a value on every tuple");
    for (double v : table.values)
      if (!std::isfinite(v) || std::abs(v) > table.bound + tol)
        throw InvalidInput("structure: relation " + name + " exceeds its bound");
    signature_.relations.push_back({name, table.arity, table.bound, "lipschitz:1"});
  }

  if (domains_.empty()) domains_.push_back(iota_points(static_cast<int>(m)));
  std::set<int> prev;
  for (auto& d : domains_) {
    std::sort(d.begin(), d.end());
    if (std::adjacent_find(d.begin(), d.end()) != d.end())
      throw InvalidInput("structure: repeated point in a domain");
    for (int x : d)
      if (x < 0 || x >= m) throw InvalidInput("structure: domain index out of range");
    std::set<int> cur(d.begin(), d.end());
    if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()))
      throw InvalidInput("structure: domains must be nested");
    prev = std::move(cur);
  }
  if (domains_.front().empty()) throw InvalidInput("structure: domains must be nonempty");
  if (static_cast<Eigen::Index>(prev.size()) != m)
    throw InvalidInput("structure: the union of the domains must be every point");

  signature_.domains = static_cast<int>(domains_.size());
  signature_.languages = std::move(languages);
  signature_.validate();
}

bool FiniteStructure::has_relation(const std::string& name) const {
  return name == kMetric || relations_.count(name) > 0;
}

int FiniteStructure::arity(const std::string& name) const {
  if (name == kMetric) return 2;
  auto it = relations_.find(name);
  if (it == relations_.end()) throw InvalidInput("structure: missing relation '" + name + "'");
  return it->second.arity;
}

double FiniteStructure::bound(const std::string& name) const {
  if (name == kMetric) return metric_.maxCoeff();
  auto it = relations_.find(name);
  if (it == relations_.end()) throw InvalidInput("structure: missing relation '" + name + "'");
  return it->second.bound;
}

double FiniteStructure::relation(const std::string& name, std::span<const int> tuple) const {
  const int m = size();
  auto check = [&](int x) {
    if (x < 0 || x >= m) throw InvalidInput("structure: point index out of range");
  };
  if (name == kMetric) {
    if (tuple.size() != 2) throw InvalidInput("structure: the metric is binary");
    check(tuple[0]);
    check(tuple[1]);
    return metric_(tuple[0], tuple[1]);
  }
  auto it = relations_.find(name);
  if (it == relations_.end()) throw InvalidInput("structure: missing relation '" + name + "'");
  if (static_cast<int>(tuple.size()) != it->second.arity)
    throw InvalidInput("structure: wrong arity for '" + name + "'");
  std::size_t idx = 0;
  for (int x : tuple) {
    check(x);
    idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(x);
  }
  return it->second.values[idx];
}

const std::vector<int>& FiniteStructure::domain(int k) const {
  if (k < 1) throw InvalidInput("structure: domain index must be >= 1");
  return domains_[static_cast<std::size_t>(std::min(k, domain_count()) - 1)];
}

FiniteStructure FiniteStructure::relabeled(const std::vector<int>& perm) const {
  const int m = size();
  if (static_cast<int>(perm.size()) != m) throw InvalidInput("relabel: permutation has wrong length");
  std::vector<int> seen(static_cast<std::size_t>(m), 0);
  for (int p : perm) {
    if (p < 0 || p >= m || seen[static_cast<std::size_t>(p)]++)
      throw InvalidInput("relabel: not a permutation");
  }
  auto at = [&](int i) { return perm[static_cast<std::size_t>(i)]; };
  Eigen::MatrixXd metric(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) metric(at(i), at(j)) = metric_(i, j);
  std::map<std::string, RelationTable> rels;
  for (const auto& [name, table] : relations_) {
    RelationTable t = table;
    for_each_tuple(iota_points(m), table.arity, [&](const std::vector<int>& xs) {
      std::size_t src = 0, dst = 0;
      for (int x : xs) {
        src = src * static_cast<std::size_t>(m) + static_cast<std::size_t>(x);
        dst = dst * static_cast<std::size_t>(m) + static_cast<std::size_t>(at(x));
      }
      t.values[dst] = table.values[src];
    });
    rels.emplace(name, std::move(t));
  }
  std::vector<std::vector<int>> doms;
  for (const auto& d : domains_) {
    std::vector<int> nd;
    for (int x : d) nd.push_back(at(x));
    doms.push_back(std::move(nd));
  }
  return FiniteStructure(std::move(metric), std::move(rels), std::move(doms),
                         signature_.languages);
}

bool katetov_check(std::span<const double> f, const FiniteStructure& x, double slack) {
  const int m = x.size();
  if (static_cast<int>(f.size()) != m)
    throw DimensionError("katetov_check: function length differs from the structure size");
  const auto& d = x.metric();
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double fi = f[static_cast<std::size_t>(i)], fj = f[static_cast<std::size_t>(j)];
      if (std::abs(fi - fj) > d(i, j) + slack) return false;
      if (d(i, j) > fi + fj + slack) return false;
    }
  return true;
}

bool is_approx_isometry(const ApproxIsometry& psi, const FiniteStructure& m,
                        const FiniteStructure& n, double slack) {
  if (psi.rows() != m.size() || psi.cols() != n.size())
    throw DimensionError("approximate isometry: table shape differs from the structures");
  for (Eigen::Index i = 0; i < psi.rows(); ++i) {
    Eigen::VectorXd row = psi.row(i).transpose();
    if (!katetov_check(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), n, slack))
      return false;
  }
  for (Eigen::Index j = 0; j < psi.cols(); ++j) {
    Eigen::VectorXd col = psi.col(j);
    if (!katetov_check(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), m, slack))
      return false;
  }
  return true;
}

double eps_of_bijection(const ApproxIsometry& psi) {
  if (psi.size() == 0) throw DimensionError("eps_of_bijection: empty table");
  return std::max(psi.rowwise().minCoeff().maxCoeff(), psi.colwise().minCoeff().maxCoeff());
}

ApproxIsometry lift_relation(const ApproxIsometry& psi, const std::string& relation,
                             const FiniteStructure& m, const FiniteStructure& n) {
  if (psi.rows() != m.size() || psi.cols() != n.size())
    throw DimensionError("lift_relation: table shape differs from the structures");
  if (!m.has_relation(relation) || !n.has_relation(relation))
    throw InvalidInput("lift_relation: missing relation '" + relation + "'");
  const int a = m.arity(relation);
  if (n.arity(relation) != a) throw NotComparableError("lift_relation: arity mismatch");
  const auto rows = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(m.size()), a));
  const auto cols = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(n.size()), a));
  ApproxIsometry out(rows, cols);
  Eigen::Index r = 0;
  for_each_tuple(iota_points(m.size()), a, [&](const std::vector<int>& xs) {
    const double bx = m.relation(relation, xs);
    Eigen::Index c = 0;
    for_each_tuple(iota_points(n.size()), a, [&](const std::vector<int>& ys) {
      double v = std::abs(bx - n.relation(relation, ys));
      for (int i = 0; i < a; ++i)
        v = std::max(v, psi(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)]));
      out(r, c++) = v;
    });
    ++r;
  });
  return out;
}

ApproxIsometry extend_correspondence(const FiniteStructure& m, const FiniteStructure& n,
                                     const Correspondence& r, double eps) {
  if (r.empty()) throw InvalidInput("extend_correspondence: empty correspondence");
  ApproxIsometry psi = ApproxIsometry::Constant(m.size(), n.size(), kInf);
  for (const auto& [xp, yp] : r) {
    if (xp < 0 || xp >= m.size() || yp < 0 || yp >= n.size())
      throw InvalidInput("extend_correspondence: index out of range");
    for (int x = 0; x < m.size(); ++x)
      for (int y = 0; y < n.size(); ++y)
        psi(x, y) = std::min(psi(x, y), eps + m.metric()(x, xp) + n.metric()(yp, y));
  }
  return psi;
}

double correspondence_eps(const FiniteStructure& m, const FiniteStructure& n, int k,
                          const Correspondence& r) {
  require_compatible(m, n);
  const auto& dm = m.domain(k);
  const auto& dn = n.domain(k);
  std::vector<std::vector<int>> fwd(static_cast<std::size_t>(m.size()));
  std::vector<std::vector<int>> bwd(static_cast<std::size_t>(n.size()));
  for (const auto& [x, y] : r) {
    if (!std::binary_search(dm.begin(), dm.end(), x) || !std::binary_search(dn.begin(), dn.end(), y))
      return kInf;
    fwd[static_cast<std::size_t>(x)].push_back(y);
    bwd[static_cast<std::size_t>(y)].push_back(x);
  }
  for (int x : dm)
    if (fwd[static_cast<std::size_t>(x)].empty()) return kInf;
  for (int y : dn)
    if (bwd[static_cast<std::size_t>(y)].empty()) return kInf;

  double eps = 0.0;
  for (const auto& [x, y] : r)
    for (const auto& [xp, yp] : r)
      eps = std::max(eps, 0.5 * std::abs(m.metric()(x, xp) - n.metric()(y, yp)));
  for (const auto& name : m.signature().language(k)) {
    eps = std::max(eps, relation_gap(m, n, name, dm, fwd));
    eps = std::max(eps, relation_gap(n, m, name, dn, bwd));
  }
  return eps;
}

namespace {

using Mask = std::uint64_t;

// Bron-Kerbosch with pivoting; stops when visit returns true.
bool maximal_cliques(const std::vector<Mask>& adj, Mask r, Mask p, Mask x,
                     const std::function<bool(Mask)>& visit) {
  if (p == 0 && x == 0) return visit(r);
  const Mask px = p | x;
  int pivot = std::countr_zero(px);
  int best = -1;
  for (Mask s = px; s; s &= s - 1) {
    const int u = std::countr_zero(s);
    const int c = std::popcount(p & adj[static_cast<std::size_t>(u)]);
    if (c > best) {
      best = c;
      pivot = u;
    }
  }
  for (Mask s = p & ~adj[static_cast<std::size_t>(pivot)]; s; s &= s - 1) {
    const int v = std::countr_zero(s);
    const Mask bit = Mask{1} << v;
    if (maximal_cliques(adj, r | bit, p & adj[static_cast<std::size_t>(v)],
                        x & adj[static_cast<std::size_t>(v)], visit))
      return true;
    p &= ~bit;
    x |= bit;
  }
  return false;
}

}  // namespace

DkResult dk_bruteforce(const FiniteStructure& m, const FiniteStructure& n, int k, int cap) {
  require_compatible(m, n);
  if (k < 1) throw InvalidInput("dk: k must be >= 1");
  if (cap < 1 || cap > 8) throw InvalidInput("dk: cap must lie in 1..8");
  const auto& dm = m.domain(k);
  const auto& dn = n.domain(k);
  const long need = static_cast<long>(std::max(dm.size(), dn.size()));
  if (need > cap) throw CapacityError("dk: domain larger than the cap", need, cap);

  std::vector<std::pair<int, int>> pairs;
  for (int x : dm)
    for (int y : dn) pairs.emplace_back(x, y);

  std::vector<double> cand{0.0};
  for (const auto& [x, y] : pairs)
    for (const auto& [xp, yp] : pairs)
      cand.push_back(0.5 * std::abs(m.metric()(x, xp) - n.metric()(y, yp)));
  for (const auto& name : m.signature().language(k)) {
    const int a = m.arity(name);
    for_each_tuple(dm, a, [&](const std::vector<int>& xs) {
      const double bx = m.relation(name, xs);
      for_each_tuple(dn, a, [&](const std::vector<int>& ys) {
        cand.push_back(std::abs(bx - n.relation(name, ys)));
      });
    });
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  DkResult res;
  res.k = k;
  auto feasible = [&](double eps, Correspondence* witness) {
    const std::size_t v = pairs.size();
    std::vector<Mask> adj(v, 0);
    for (std::size_t i = 0; i < v; ++i)
      for (std::size_t j = 0; j < v; ++j) {
        if (i == j) continue;
        const auto [x, y] = pairs[i];
        const auto [xp, yp] = pairs[j];
        if (x == xp && y == yp) continue;
        if (std::abs(m.metric()(x, xp) - n.metric()(y, yp)) <= 2.0 * eps + kSlack)
          adj[i] |= Mask{1} << j;
      }
    const Mask all = v == 64 ? ~Mask{0} : (Mask{1} << v) - 1;
    return maximal_cliques(adj, 0, all, 0, [&](Mask clique) {
      ++res.cliques;
      Correspondence r;
      for (Mask s = clique; s; s &= s - 1) r.push_back(pairs[static_cast<std::size_t>(std::countr_zero(s))]);
      if (correspondence_eps(m, n, k, r) <= eps + kSlack) {
        if (witness) *witness = std::move(r);
        return true;
      }
      return false;
    });
  };

  std::size_t lo = 0, hi = cand.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(cand[mid], nullptr))
      hi = mid;
    else
      lo = mid + 1;
  }
  feasible(cand[lo], &res.correspondence);
  res.value = correspondence_eps(m, n, k, res.correspondence);
  return res;
}

GhReport dgh_report(const FiniteStructure& m, const FiniteStructure& n, int k_max, int cap) {
  if (k_max < 1) throw InvalidInput("dgh: k_max must be >= 1");
  GhReport rep;
  for (int k = 1; k <= k_max; ++k) {
    rep.levels.push_back(dk_bruteforce(m, n, k, cap));
    rep.value += std::ldexp(rep.levels.back().value, -k);
  }
  return rep;
}

double dgh_structures(const FiniteStructure& m, const FiniteStructure& n, int k_max, int cap) {
  return dgh_report(m, n, k_max, cap).value;
}

}  // namespace osinv::metricgh
