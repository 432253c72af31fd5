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

// The JSON dialect shared by every input file and report.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "osinv/degree1.hpp"
#include "osinv/linalg.hpp"
#include "osinv/metricgh.hpp"
#include "osinv/opsys.hpp"

namespace osinv::cli {

using Json = nlohmann::ordered_json;
using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

// Non-finite values become the strings "inf", "-inf" and "nan".
Json num(double v);
double real_of(const Json& j, const char* what);
Json complex_json(Complex z);
Json vector_json(const Vector& v);
Json reals_json(const std::vector<double>& v);
Json matrix_json(const Matrix& m);
Json real_matrix_json(const Eigen::MatrixXd& m);

// Pretty printer with every double written as %.17g.
std::string dump(const Json& j);

Json read_json_file(const std::string& path);

Complex parse_complex(const Json& j);
Vector parse_vector(const Json& j);
Matrix parse_matrix(const Json& j);
opsys::OperatorSystemSpan parse_system(const Json& j);
degree1::PointSet parse_points(const Json& j);
metricgh::FiniteStructure parse_structure(const Json& j);

}  // namespace osinv::cli
