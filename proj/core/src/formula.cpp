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

#include "osinv/formula.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <optional>

#include "osinv/error.hpp"

namespace osinv::metricgh {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

FormulaPtr binary(Formula::Kind kind, FormulaPtr a, FormulaPtr b) {
  if (!a || !b) throw InvalidInput("formula: null operand");
  Formula f;
  f.kind = kind;
  f.children = {std::move(a), std::move(b)};
  return make(std::move(f));
}

FormulaPtr quantifier(Formula::Kind kind, std::string var, int domain, FormulaPtr body) {
  if (!body) throw InvalidInput("formula: null body");
  if (var.empty()) throw InvalidInput("formula: empty variable name");
  if (domain < 1) throw InvalidInput("formula: domain index must be >= 1");
  Formula f;
  f.kind = kind;
  f.vars = {std::move(var)};
  f.domain = domain;
  f.children = {std::move(body)};
  return make(std::move(f));
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double eval(const Formula& phi, const FiniteStructure& m, Assignment& env) {
  using K = Formula::Kind;
  switch (phi.kind) {
    case K::Const:
      return phi.value;
    case K::Atom: {
      if (!m.has_relation(phi.relation))
        throw InvalidInput("formula: missing relation '" + phi.relation + "'");
      std::vector<int> tuple;
      tuple.reserve(phi.vars.size());
      for (const auto& v : phi.vars) {
        auto it = env.find(v);
        if (it == env.end()) throw InvalidInput("formula: unbound variable '" + v + "'");
        tuple.push_back(it->second);
      }
      return m.relation(phi.relation, tuple);
    }
    case K::Max:
      return std::max(eval(*phi.children[0], m, env), eval(*phi.children[1], m, env));
    case K::Min:
      return std::min(eval(*phi.children[0], m, env), eval(*phi.children[1], m, env));
    case K::Add:
      return eval(*phi.children[0], m, env) + eval(*phi.children[1], m, env);
    case K::TruncSub:
      return std::max(0.0, eval(*phi.children[0], m, env) - eval(*phi.children[1], m, env));
    case K::Scale:
      return phi.value * eval(*phi.children[0], m, env);
    case K::Sup:
    case K::Inf: {
      const bool sup = phi.kind == K::Sup;
      const auto& var = phi.vars.front();
      auto saved = env.find(var) == env.end() ? std::optional<int>{} : std::optional<int>{env[var]};
      double acc = sup ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
      for (int x : m.domain(phi.domain)) {
        env[var] = x;
        const double v = eval(*phi.children[0], m, env);
        acc = sup ? std::max(acc, v) : std::min(acc, v);
      }
      if (saved)
        env[var] = *saved;
      else
        env.erase(var);
      return acc;
    }
  }
  return 0.0;
}

FormulaPtr close_sup(FormulaPtr body, int nvars, int domain) {
  for (int i = nvars; i >= 1; --i) body = Formula::sup("x" + std::to_string(i), domain, body);
  return body;
}

void tuples(int nvars, int arity, std::vector<int>& cur,
            std::vector<std::vector<std::string>>& out) {
  if (static_cast<int>(cur.size()) == arity) {
    std::vector<std::string> vs;
    for (int c : cur) vs.push_back("x" + std::to_string(c + 1));
    out.push_back(std::move(vs));
    return;
  }
  for (int i = 0; i < nvars; ++i) {
    cur.push_back(i);
    tuples(nvars, arity, cur, out);
    cur.pop_back();
  }
}

}  // namespace

FormulaPtr Formula::constant(double c) {
  Formula f;
  f.kind = Kind::Const;
  f.value = c;
  return make(std::move(f));
}

FormulaPtr Formula::atom(std::string relation, std::vector<std::string> vars) {
  if (vars.empty()) throw InvalidInput("formula: atom needs at least one argument");
  Formula f;
  f.kind = Kind::Atom;
  f.relation = std::move(relation);
  f.vars = std::move(vars);
  return make(std::move(f));
}

FormulaPtr Formula::max(FormulaPtr a, FormulaPtr b) { return binary(Kind::Max, std::move(a), std::move(b)); }
FormulaPtr Formula::min(FormulaPtr a, FormulaPtr b) { return binary(Kind::Min, std::move(a), std::move(b)); }
FormulaPtr Formula::add(FormulaPtr a, FormulaPtr b) { return binary(Kind::Add, std::move(a), std::move(b)); }
FormulaPtr Formula::trunc_sub(FormulaPtr a, FormulaPtr b) {
  return binary(Kind::TruncSub, std::move(a), std::move(b));
}

FormulaPtr Formula::scale(double q, FormulaPtr a) {
  if (!a) throw InvalidInput("formula: null operand");
  if (!(q >= 0.0)) throw InvalidInput("formula: scale factor must be nonnegative");
  Formula f;
  f.kind = Kind::Scale;
  f.value = q;
  f.children = {std::move(a)};
  return make(std::move(f));
}

FormulaPtr Formula::sup(std::string var, int domain, FormulaPtr body) {
  return quantifier(Kind::Sup, std::move(var), domain, std::move(body));
}

FormulaPtr Formula::inf(std::string var, int domain, FormulaPtr body) {
  return quantifier(Kind::Inf, std::move(var), domain, std::move(body));
}

std::set<std::string> Formula::free_variables() const {
  std::set<std::string> out;
  if (kind == Kind::Atom) return {vars.begin(), vars.end()};
  for (const auto& c : children) {
    auto sub = c->free_variables();
    out.insert(sub.begin(), sub.end());
  }
  if (kind == Kind::Sup || kind == Kind::Inf) out.erase(vars.front());
  return out;
}

bool Formula::universal() const {
  if (kind == Kind::Inf) return false;
  return std::all_of(children.begin(), children.end(),
                     [](const FormulaPtr& c) { return c->universal(); });
}

std::string Formula::to_string() const {
  switch (kind) {
    case Kind::Const:
      return number(value);
    case Kind::Atom: {
      std::string s = relation + "(";
      for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? "," : "") + vars[i];
      return s + ")";
    }
    case Kind::Max:
      return "max(" + children[0]->to_string() + ", " + children[1]->to_string() + ")";
    case Kind::Min:
      return "min(" + children[0]->to_string() + ", " + children[1]->to_string() + ")";
    case Kind::Add:
      return "(" + children[0]->to_string() + " + " + children[1]->to_string() + ")";
    case Kind::TruncSub:
      return "(" + children[0]->to_string() + " -. " + children[1]->to_string() + ")";
    case Kind::Scale:
      return number(value) + "*" + children[0]->to_string();
    case Kind::Sup:
    case Kind::Inf:
      return std::string(kind == Kind::Sup ? "sup" : "inf") + "[" + vars.front() + " in D" +
             std::to_string(domain) + "] " + children[0]->to_string();
  }
  return {};
}

double eval_formula(const Formula& phi, const FiniteStructure& m, const Assignment& assignment) {
  for (const auto& v : phi.free_variables())
    if (!assignment.count(v)) throw InvalidInput("formula: unbound variable '" + v + "'");
  for (const auto& [v, x] : assignment)
    if (x < 0 || x >= m.size()) throw InvalidInput("formula: assignment of '" + v + "' out of range");
  Assignment env = assignment;
  return eval(phi, m, env);
}

std::vector<FormulaPtr> universal_sentences(const Signature& sig, int depth) {
  if (depth < 1) throw InvalidInput("fingerprint: depth must be >= 1");
  struct Sym {
    std::string name;
    int arity;
    double bound;
    bool metric;
  };
  std::vector<Sym> syms{{kMetric, 2, 0.0, true}};
  for (const auto& r : sig.relations) syms.push_back({r.name, r.arity, r.bound, false});

  std::vector<FormulaPtr> out;
  for (int level = 1; level <= depth; ++level) {
    for (int k = 1; k <= sig.domains; ++k) {
      if (level == 1) {
        for (const auto& s : syms) {
          std::vector<std::string> vs;
          for (int i = 1; i <= s.arity; ++i) vs.push_back("x" + std::to_string(i));
          auto a = Formula::atom(s.name, vs);
          out.push_back(close_sup(a, s.arity, k));
          if (!s.metric)
            out.push_back(close_sup(Formula::trunc_sub(Formula::constant(s.bound), a), s.arity, k));
        }
        continue;
      }
      std::vector<FormulaPtr> atoms;
      for (const auto& s : syms) {
        std::vector<std::vector<std::string>> ts;
        std::vector<int> cur;
        tuples(level, s.arity, cur, ts);
        for (auto& t : ts) atoms.push_back(Formula::atom(s.name, std::move(t)));
      }
      for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = 0; j < atoms.size(); ++j) {
          if (i < j) {
            out.push_back(close_sup(Formula::max(atoms[i], atoms[j]), level, k));
            out.push_back(close_sup(Formula::min(atoms[i], atoms[j]), level, k));
          }
          if (i != j) out.push_back(close_sup(Formula::trunc_sub(atoms[i], atoms[j]), level, k));
        }
    }
  }
  return out;
}

Fingerprint universal_fingerprint(const FiniteStructure& m, int depth) {
  Fingerprint fp;
  for (const auto& phi : universal_sentences(m.signature(), depth)) {
    fp.sentences.push_back(phi->to_string());
    fp.values.push_back(eval_formula(*phi, m));
  }
  return fp;
}

}  // namespace osinv::metricgh
