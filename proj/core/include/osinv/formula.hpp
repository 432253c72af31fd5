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

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "osinv/metricgh.hpp"

namespace osinv::metricgh {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Lattice terms over max, min, sums, truncated differences and nonnegative
// rational scaling, with sup/inf quantifiers over a numbered domain.
struct Formula {
  enum class Kind { Const, Atom, Max, Min, Add, TruncSub, Scale, Sup, Inf };

  Kind kind = Kind::Const;
  double value = 0.0;              // Const value or Scale factor
  std::string relation;            // Atom
  std::vector<std::string> vars;   // Atom arguments, or the bound variable
  int domain = 1;                  // Sup / Inf
  std::vector<FormulaPtr> children;

  static FormulaPtr constant(double c);
  static FormulaPtr atom(std::string relation, std::vector<std::string> vars);
  static FormulaPtr max(FormulaPtr a, FormulaPtr b);
  static FormulaPtr min(FormulaPtr a, FormulaPtr b);
  static FormulaPtr add(FormulaPtr a, FormulaPtr b);
  static FormulaPtr trunc_sub(FormulaPtr a, FormulaPtr b);
  static FormulaPtr scale(double q, FormulaPtr a);
  static FormulaPtr sup(std::string var, int domain, FormulaPtr body);
  static FormulaPtr inf(std::string var, int domain, FormulaPtr body);

  std::set<std::string> free_variables() const;
  bool universal() const;
  std::string to_string() const;
};

using Assignment = std::map<std::string, int>;

double eval_formula(const Formula& phi, const FiniteStructure& m,
                    const Assignment& assignment = {});

// Canonical universal sentences; the list for depth d is a prefix of the
// list for depth d + 1.
std::vector<FormulaPtr> universal_sentences(const Signature& sig, int depth);

struct Fingerprint {
  std::vector<std::string> sentences;
  std::vector<double> values;
};

Fingerprint universal_fingerprint(const FiniteStructure& m, int depth);

}  // namespace osinv::metricgh
