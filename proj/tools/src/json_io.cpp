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

#include "json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "osinv/error.hpp"

namespace osinv::cli {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

bool scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) flat = flat && (scalar(e) || (e.is_array() && std::all_of(e.begin(), e.end(), scalar)));
      if (flat && j.size() <= 64) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(out, j[i], indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += inner;
        write(out, j[i], indent + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += inner + Json(it.key()).dump() + ": ";
        write(out, it.value(), indent + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_of(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw InvalidInput(std::string(what) + ": expected a number");
}

Json complex_json(Complex z) { return Json::array({num(z.real()), num(z.imag())}); }

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

Json reals_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return Json{{"rows", rows}};
}

Json real_matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(num(m(i, c)));
    rows.push_back(row);
  }
  return rows;
}

std::string dump(const Json& j) {
  std::string out;
  write(out, j, 0);
  out += "\n";
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

Complex parse_complex(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
          "complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vector parse_vector(const Json& j) {
  require(j.is_array(), "expected an array of complex numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_complex(j[i]);
  return v;
}

Matrix parse_matrix(const Json& j) {
  require(j.is_object() && j.contains("rows") && j["rows"].is_array(),
          "matrices are objects with a \"rows\" array");
  const auto& rows = j["rows"];
  require(!rows.empty(), "matrix has no rows");
  const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  require(cols > 0, "matrix has no columns");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].is_array() && rows[r].size() == cols, "matrix rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(rows[r][c]);
  }
  return m;
}

opsys::OperatorSystemSpan parse_system(const Json& j) {
  require(j.is_object() && j.contains("generators") && j["generators"].is_array(),
          "systems need a \"generators\" array");
  std::vector<Matrix> gens;
  for (const auto& g : j["generators"]) gens.push_back(parse_matrix(g));
  if (j.contains("ambient_dim")) {
    require(j["ambient_dim"].is_number_integer(), "ambient_dim must be an integer");
    const auto k = j["ambient_dim"].get<long>();
    for (const auto& g : gens)
      require(g.rows() == k && g.cols() == k, "generator size differs from ambient_dim");
  }
  const bool with_identity = j.value("include_identity", true);
  return opsys::build_system(gens, with_identity);
}

degree1::PointSet parse_points(const Json& j) {
  require(j.is_object() && j.contains("points") && j["points"].is_array(),
          "point sets need a \"points\" array");
  const int dim = j.value("dim", 1);
  std::vector<Vector> pts;
  for (const auto& p : j["points"]) {
    Vector v = p.is_array() && !p.empty() && p[0].is_array() ? parse_vector(p)
                                                              : Vector::Constant(1, parse_complex(p));
    pts.push_back(std::move(v));
  }
  return degree1::PointSet(dim, std::move(pts));
}

metricgh::FiniteStructure parse_structure(const Json& j) {
  require(j.is_object() && j.contains("metric") && j["metric"].is_array(),
          "structures need a \"metric\" table");
  const auto& mj = j["metric"];
  const auto m = static_cast<Eigen::Index>(mj.size());
  require(m > 0, "metric table is empty");
  Eigen::MatrixXd metric(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& row = mj[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == m, "metric must be square");
    for (Eigen::Index c = 0; c < m; ++c) metric(r, c) = real_of(row[static_cast<std::size_t>(c)], "metric");
  }

  std::map<std::string, metricgh::RelationTable> rels;
  if (j.contains("relations")) {
    require(j["relations"].is_object(), "\"relations\" must be an object");
    for (auto it = j["relations"].begin(); it != j["relations"].end(); ++it) {
      const auto& rj = it.value();
      require(rj.is_object() && rj.contains("arity") && rj["arity"].is_number_integer(),
              "relation " + it.key() + " needs an integer arity");
      metricgh::RelationTable t;
      t.arity = rj["arity"].get<int>();
      require(t.arity >= 1 && t.arity <= 4, "relation " + it.key() + ": arity must lie in 1..4");
      std::size_t count = 1;
      for (int a = 0; a < t.arity; ++a) count *= static_cast<std::size_t>(m);
      t.values.assign(count, 0.0);
      std::vector<bool> seen(count, false);
      const auto& tab = rj.at("table");
      if (tab.is_array()) {
        require(tab.size() == count, "relation " + it.key() + ": table needs every tuple");
        for (std::size_t i = 0; i < count; ++i) {
          t.values[i] = real_of(tab[i], "relation value");
          seen[i] = true;
        }
      } else {
        require(tab.is_object(), "relation " + it.key() + ": table must be an object or array");
        for (auto e = tab.begin(); e != tab.end(); ++e) {
          std::stringstream ss(e.key());
          std::string part;
          std::size_t idx = 0;
          int parts = 0;
          while (std::getline(ss, part, ',')) {
            std::size_t used = 0;
            long x = -1;
            try {
              x = std::stol(part, &used);
            } catch (const std::exception&) {
            }
            require(x >= 0 && x < m && used == part.size(),
                    "relation " + it.key() + ": bad tuple key '" + e.key() + "'");
            idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(x);
            ++parts;
          }
          require(parts == t.arity, "relation " + it.key() + ": tuple '" + e.key() + "' has wrong arity");
          require(!seen[idx], "relation " + it.key() + ": repeated tuple '" + e.key() + "'");
          t.values[idx] = real_of(e.value(), "relation value");
          seen[idx] = true;
        }
      }
      for (bool s : seen) require(s, "relation " + it.key() + ": table needs a value on every tuple");
      double top = 1.0;
      for (double v : t.values) top = std::max(top, std::abs(v));
      t.bound = rj.contains("bound") ? real_of(rj["bound"], "bound") : top;
      rels.emplace(it.key(), std::move(t));
    }
  }

  std::vector<std::vector<int>> domains;
  if (j.contains("domains")) {
    require(j["domains"].is_array(), "\"domains\" must be an array");
    for (const auto& d : j["domains"]) {
      require(d.is_array(), "each domain is an array of indices");
      std::vector<int> dom;
      for (const auto& x : d) {
        require(x.is_number_integer(), "domain entries are integers");
        dom.push_back(x.get<int>());
      }
      domains.push_back(std::move(dom));
    }
  }
  std::vector<std::vector<std::string>> languages;
  if (j.contains("languages")) {
    require(j["languages"].is_array(), "\"languages\" must be an array");
    for (const auto& l : j["languages"]) {
      require(l.is_array(), "each language is an array of names");
      std::vector<std::string> names;
      for (const auto& s : l) {
        require(s.is_string(), "language entries are relation names");
        names.push_back(s.get<std::string>());
      }
      languages.push_back(std::move(names));
    }
  }
  return metricgh::FiniteStructure(std::move(metric), std::move(rels), std::move(domains),
                                   std::move(languages));
}

}  // namespace osinv::cli
