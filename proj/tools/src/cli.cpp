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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "osinv/degree1.hpp"
#include "osinv/error.hpp"
#include "osinv/formula.hpp"
#include "osinv/metricgh.hpp"
#include "osinv/opsys.hpp"
#include "osinv/osdist.hpp"
#include "osinv/unitary.hpp"

namespace osinv::cli {

namespace {

using unitary::Verdict;

Json ints_json(const std::vector<int>& v) {
  Json out = Json::array();
  for (int x : v) out.push_back(x);
  return out;
}

std::vector<int> parse_ints(const Json& j) {
  std::vector<int> out;
  for (const auto& x : j) out.push_back(x.get<int>());
  return out;
}

Json circle_json(const unitary::CircleSet& s) {
  Json pts = Json::array();
  for (auto z : s.points()) pts.push_back(complex_json(z));
  return Json{{"size", s.size()}, {"angles", reals_json(s.angles())}, {"points", pts}};
}

// ---- spectra ---------------------------------------------------------------

Json compute_spectrum(const Json& args, const Json& inputs, bool canon) {
  const auto s = unitary::spectrum(parse_matrix(inputs.at("u")), args.at("tol").get<double>());
  Json out{{"spectrum", circle_json(s)}};
  if (canon) {
    const auto c = unitary::canonical_form(s);
    out["gaps"] = reals_json(c.gaps);
    out["reflected"] = c.reflected;
  }
  return out;
}

Json decision_json(const unitary::CoisDecision& d) {
  Json out{{"verdict", unitary::to_string(d.verdict)},
           {"method", unitary::to_string(d.method)},
           {"note", d.note},
           {"source", circle_json(d.source)},
           {"target", circle_json(d.target)}};
  if (d.motion)
    out["motion"] = Json{{"rotation", num(d.motion->rotation)},
                         {"reflect", d.motion->reflect},
                         {"residual", num(d.motion_residual)}};
  if (d.bijection)
    out["certificate"] = Json{{"bijection", ints_json(d.bijection->bijection)},
                              {"forward_coeffs", vector_json(d.bijection->forward_coeffs)},
                              {"backward_coeffs", vector_json(d.bijection->backward_coeffs)},
                              {"forward_residual", num(d.bijection->forward_residual)},
                              {"backward_residual", num(d.bijection->backward_residual)}};
  if (d.exhaustion) {
    Json fails = Json::array();
    for (const auto& f : d.exhaustion->failures)
      fails.push_back(Json{{"bijection", ints_json(f.bijection)},
                           {"forward_residual", num(f.forward_residual)},
                           {"backward_residual", num(f.backward_residual)}});
    out["exhaustion"] = Json{{"tried", d.exhaustion->tried},
                             {"min_blocking", num(d.exhaustion->min_blocking)},
                             {"failures", fails}};
  }
  return out;
}

Json compute_cois(const Json& args, const Json& inputs, int jobs, int& code) {
  const Matrix u = parse_matrix(inputs.at("u"));
  const Matrix v = parse_matrix(inputs.at("v"));
  const double tol = args.at("tol").get<double>();
  const auto theorem = unitary::cois_unitary_theorem(u, v, tol);
  Json out;
  if (args.at("oracle").get<bool>()) {
    unitary::OracleOptions o;
    o.tol = tol;
    o.span_tol = args.at("span_tol").get<double>();
    o.cap = args.at("cap").get<int>();
    o.jobs = jobs;
    const auto d = unitary::cois_unitary_oracle(u, v, o);
    out = decision_json(d);
    out["fast_path_verdict"] = unitary::to_string(theorem.verdict);
    if (d.source.size() == 4 && d.target.size() == 4) {
      const auto fp = unitary::four_point_obstruction(u, v, tol);
      Json assign = Json::array(), dets = Json::array();
      for (const auto& a : fp.assignments) assign.push_back(ints_json(a));
      for (auto z : fp.determinants) dets.push_back(complex_json(z));
      out["four_point"] = Json{{"assignments", assign},
                               {"determinants", dets},
                               {"min_modulus", num(fp.min_modulus)},
                               {"all_nonzero", fp.all_nonzero}};
    }
    code = d.verdict == Verdict::Unknown ? kUnknown : kOk;
  } else {
    out = decision_json(theorem);
    code = theorem.verdict == Verdict::Unknown ? kUnknown : kOk;
  }
  return out;
}

// ---- degree one ------------------------------------------------------------

Json map_json(const degree1::DegreeOneMap& f) {
  Json coeffs = Json::array();
  for (const auto& c : f.coeffs) coeffs.push_back(vector_json(c));
  return Json{{"ambient", f.ambient}, {"coeffs", coeffs}};
}

degree1::DegreeOneMap parse_map(const Json& j) {
  degree1::DegreeOneMap f;
  f.ambient = j.at("ambient").get<int>();
  for (const auto& c : j.at("coeffs")) f.coeffs.push_back(parse_vector(c));
  return f;
}

Json compute_deg1(const Json& args, const Json& inputs, int jobs) {
  const auto d = parse_points(inputs.at("d"));
  const auto e = parse_points(inputs.at("e"));
  degree1::Deg1Options o;
  o.tol = args.at("tol").get<double>();
  o.cap = args.at("cap").get<int>();
  o.jobs = jobs;
  const auto dec = degree1::degree_one_homeomorphic(d, e, o);
  Json out{{"homeomorphic", dec.homeomorphic}, {"tried", dec.tried}, {"note", dec.note}};
  if (dec.witness)
    out["certificate"] = Json{{"bijection", ints_json(dec.witness->bijection)},
                              {"forward", map_json(dec.witness->forward)},
                              {"backward", map_json(dec.witness->backward)},
                              {"forward_residual", num(dec.witness->forward_residual)},
                              {"backward_residual", num(dec.witness->backward_residual)}};
  return out;
}

// ---- operator systems ------------------------------------------------------

Json compute_norm(const Json& args, const Json& inputs) {
  const auto x = parse_system(inputs.at("system"));
  const Matrix a = parse_matrix(inputs.at("element"));
  const int n = args.at("level").get<int>();
  if (n < 1) throw InvalidInput("norm: level must be >= 1");
  const Eigen::Index k = x.ambient_dim;
  if (a.rows() != n * k || a.cols() != n * k)
    throw InvalidInput("norm: element must be an n*k x n*k block matrix");
  opsys::AmplifiedElement el(n, x.dim());
  Json coords = Json::array();
  for (int i = 0; i < n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < n; ++j) {
      el.at(i, j) = x.coordinates(a.block(i * k, j * k, k, k));
      row.push_back(vector_json(el.at(i, j)));
    }
    coords.push_back(row);
  }
  return Json{{"level", n},
              {"system_dim", x.dim()},
              {"norm", num(opsys::amplified_norm(x, el))},
              {"coordinates", coords}};
}

osdist::SearchOptions search_options(const Json& args, int jobs) {
  osdist::SearchOptions o;
  o.restarts = args.at("restarts").get<int>();
  o.seed = args.at("seed").get<std::uint64_t>();
  o.max_evals = args.at("max_evals").get<int>();
  o.jobs = jobs;
  if (o.restarts < 1) throw InvalidInput("osdist: restarts must be >= 1");
  return o;
}

Json compute_osdist(const Json& args, const Json& inputs, int jobs) {
  const auto x = parse_system(inputs.at("x"));
  const auto y = parse_system(inputs.at("y"));
  const auto rep = osdist::dgh_weighted(x, y, args.at("levels").get<int>(), search_options(args, jobs));
  Json levels = Json::array();
  for (const auto& l : rep.per_level)
    levels.push_back(Json{{"level", l.level},
                          {"value", num(l.value)},
                          {"terms", Json{{"unit_defect", num(l.terms.unit_defect)},
                                         {"log_forward", num(l.terms.log_forward)},
                                         {"log_inverse", num(l.terms.log_inverse)}}},
                          {"best_map", matrix_json(l.best_map.matrix)},
                          {"condition", num(l.best_map.condition)},
                          {"restarts_used", l.restarts_used},
                          {"best_restart", l.best_restart},
                          {"profile", reals_json(l.profile)},
                          {"converged", l.converged}});
  return Json{{"weighted", num(rep.weighted)},
              {"seed", rep.seed},
              {"restarts", rep.restarts},
              {"converged", rep.converged},
              {"note", "best-found values of a nonconvex search, not certified bounds"},
              {"levels", levels}};
}

osdist::WtVariant parse_variant(const std::string& s) {
  if (s == "3x3") return osdist::WtVariant::ThreeByThree;
  if (s == "2x2") return osdist::WtVariant::TwoByTwo;
  throw InvalidInput("family wt: variant must be 3x3 or 2x2");
}

Json compute_wt(const Json& args, int jobs, int& code) {
  const auto variant = parse_variant(args.at("variant").get<std::string>());
  osdist::WtOracleOptions o;
  o.restarts = args.at("restarts").get<int>();
  o.seed = args.at("seed").get<std::uint64_t>();
  o.jobs = jobs;
  const double t = args.at("t").get<double>(), s = args.at("s").get<double>();
  const auto d = osdist::wt_classify(t, s, variant, args.at("tol").get<double>(), o);
  Json steps = Json::array();
  for (const auto& st : d.steps) steps.push_back(st);
  Json out{{"verdict", unitary::to_string(d.verdict)},
           {"method", unitary::to_string(d.method)},
           {"t", num(d.t)},
           {"s", num(d.s)},
           {"variant", args.at("variant")},
           {"steps", steps},
           {"singular_t", reals_json(d.singular_t)},
           {"singular_s", reals_json(d.singular_s)},
           {"commutant_dimension", osdist::commutant_dimension(osdist::wt_matrix({t, variant}))}};
  if (variant == osdist::WtVariant::ThreeByThree) {
    out["trace_w"] = num(d.trace_w);
    out["trace_w_sq"] = num(d.trace_w_sq);
    out["cross_trace"] = num(d.cross_trace);
  } else {
    out["min_residual"] = num(d.min_residual);
    out["restarts"] = d.restarts;
    out["seed"] = d.seed;
    out["certified"] = false;
  }
  if (d.witness) {
    // The 2x2 search conjugates the smaller parameter into the larger one.
    const double from = variant == osdist::WtVariant::TwoByTwo ? std::min(t, s) : t;
    const double to = variant == osdist::WtVariant::TwoByTwo ? std::max(t, s) : s;
    out["certificate"] = Json{{"from", num(from)},
                              {"to", num(to)},
                              {"unitary", matrix_json(d.witness->unitary)},
                              {"alpha", complex_json(d.witness->alpha)},
                              {"beta", complex_json(d.witness->beta)},
                              {"gamma", complex_json(d.witness->gamma)},
                              {"residual", num(d.witness->residual)}};
  }
  out["note"] = d.note;
  code = d.verdict == Verdict::Unknown ? kUnknown : kOk;
  return out;
}

// ---- finite structures -----------------------------------------------------

Json compute_gh(const Json& args, const Json& inputs) {
  const auto m = parse_structure(inputs.at("m"));
  const auto n = parse_structure(inputs.at("n"));
  const auto rep = metricgh::dgh_report(m, n, args.at("kmax").get<int>(), args.at("cap").get<int>());
  Json levels = Json::array();
  for (const auto& l : rep.levels) {
    Json corr = Json::array();
    for (const auto& [x, y] : l.correspondence) corr.push_back(Json::array({x, y}));
    levels.push_back(Json{{"k", l.k}, {"value", num(l.value)}, {"correspondence", corr},
                          {"cliques", l.cliques}});
  }
  return Json{{"value", num(rep.value)}, {"levels", levels}};
}

Json compute_theory(const Json& args, const Json& inputs) {
  const auto m = parse_structure(inputs.at("m"));
  const auto fp = metricgh::universal_fingerprint(m, args.at("depth").get<int>());
  Json sentences = Json::array();
  for (const auto& s : fp.sentences) sentences.push_back(s);
  return Json{{"depth", args.at("depth")},
              {"count", fp.values.size()},
              {"sentences", sentences},
              {"values", reals_json(fp.values)}};
}

// ---- certificate checks ----------------------------------------------------

struct Checks {
  Json list = Json::array();
  bool ok = true;
  void add(const std::string& name, bool pass, const std::string& detail = {}) {
    list.push_back(Json{{"name", name}, {"ok", pass}, {"detail", detail}});
    ok = ok && pass;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void check_cois(const Json& args, const Json& inputs, const Json& res, Checks& c) {
  const double tol = args.at("tol").get<double>();
  const double span_tol = args.at("span_tol").get<double>();
  const auto su = unitary::spectrum(parse_matrix(inputs.at("u")), tol);
  const auto sv = unitary::spectrum(parse_matrix(inputs.at("v")), tol);
  if (res.contains("motion")) {
    unitary::RigidMotion g{real_of(res["motion"]["rotation"], "rotation"),
                           res["motion"]["reflect"].get<bool>()};
    std::vector<double> moved;
    for (double a : sv.angles()) moved.push_back(g.apply_angle(a));
    const double h = unitary::hausdorff_angle(su.angles(), moved);
    c.add("rigid motion maps the target spectrum onto the source", h <= tol, "hausdorff " + fmt(h));
  }
  if (res.contains("certificate")) {
    unitary::BijectionCertificate cert;
    const bool pass = unitary::test_bijection(su.points(), sv.points(),
                                              parse_ints(res["certificate"]["bijection"]), span_tol, cert);
    c.add("bijection passes both span tests", pass,
          "residuals " + fmt(cert.forward_residual) + ", " + fmt(cert.backward_residual));
  }
  if (res.contains("exhaustion")) {
    int bad = 0;
    for (const auto& f : res["exhaustion"]["failures"]) {
      unitary::BijectionCertificate cert;
      if (unitary::test_bijection(su.points(), sv.points(), parse_ints(f["bijection"]), span_tol, cert)) ++bad;
    }
    c.add("every recorded bijection fails a span test", bad == 0,
          std::to_string(res["exhaustion"]["failures"].size()) + " records");
  }
}

void check_deg1(const Json& inputs, const Json& res, Checks& c) {
  if (!res.contains("certificate")) return;
  const auto d = parse_points(inputs.at("d"));
  const auto e = parse_points(inputs.at("e"));
  const auto& cert = res["certificate"];
  const auto h = parse_ints(cert["bijection"]);
  const double fwd = degree1::replay_error(parse_map(cert["forward"]), d, e, h);
  const double bwd = degree1::replay_error(parse_map(cert["backward"]), e, d, degree1::inverse_permutation(h));
  c.add("forward map replays on the points", fwd <= 1e-8, "error " + fmt(fwd));
  c.add("backward map replays on the points", bwd <= 1e-8, "error " + fmt(bwd));
}

void check_wt(const Json& args, const Json& res, Checks& c) {
  if (!res.contains("certificate")) return;
  const auto variant = parse_variant(args.at("variant").get<std::string>());
  const auto& cert = res["certificate"];
  const Matrix u = parse_matrix(cert["unitary"]);
  const Matrix wa = osdist::wt_matrix({real_of(cert["from"], "from"), variant});
  const Matrix wb = osdist::wt_matrix({real_of(cert["to"], "to"), variant});
  const Matrix target = parse_complex(cert["alpha"]) * Matrix::Identity(wb.rows(), wb.rows()) +
                        parse_complex(cert["beta"]) * wb + parse_complex(cert["gamma"]) * wb.adjoint();
  const double res_norm = linalg::op_norm(u * wa * u.adjoint() - target);
  const double unit = linalg::op_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.rows()));
  c.add("conjugation witness is unitary", unit <= 1e-9, "defect " + fmt(unit));
  c.add("conjugation witness lands in the target span", res_norm <= 1e-7, "residual " + fmt(res_norm));
}

void check_osdist(const Json& inputs, const Json& res, Checks& c) {
  const auto x = parse_system(inputs.at("x"));
  const auto y = parse_system(inputs.at("y"));
  for (const auto& l : res["levels"]) {
    const Matrix u = parse_matrix(l["best_map"]);
    const double defect = linalg::op_norm(y.element(u * x.unit_coeffs) -
                                          Matrix::Identity(y.ambient_dim, y.ambient_dim));
    const double stored = real_of(l["terms"]["unit_defect"], "unit_defect");
    c.add("unit defect of the level " + std::to_string(l["level"].get<int>()) + " map",
          std::abs(defect - stored) <= 1e-12 * (1.0 + stored), "recomputed " + fmt(defect));
  }
}

void check_gh(const Json& inputs, const Json& res, Checks& c) {
  const auto m = parse_structure(inputs.at("m"));
  const auto n = parse_structure(inputs.at("n"));
  for (const auto& l : res["levels"]) {
    metricgh::Correspondence r;
    for (const auto& p : l["correspondence"]) r.emplace_back(p[0].get<int>(), p[1].get<int>());
    const int k = l["k"].get<int>();
    const double eps = metricgh::correspondence_eps(m, n, k, r);
    c.add("correspondence at k = " + std::to_string(k) + " attains the value",
          std::abs(eps - real_of(l["value"], "value")) <= 1e-12, "eps " + fmt(eps));
  }
}

// ---- argument handling -----------------------------------------------------

struct Invocation {
  std::string command;
  Json args = Json::object();
  std::map<std::string, std::string> files;  // role -> path
};

Json error_object(const std::string& kind, const std::string& message, int code) {
  return Json{{"error", Json{{"kind", kind}, {"message", message}}}, {"exit_code", code}};
}

}  // namespace

Json compute(const std::string& command, const Json& args, const Json& inputs, int jobs,
             int& code) {
  code = kOk;
  if (command == "spectrum") return compute_spectrum(args, inputs, false);
  if (command == "canon") return compute_spectrum(args, inputs, true);
  if (command == "unitary-cois") return compute_cois(args, inputs, jobs, code);
  if (command == "deg1") return compute_deg1(args, inputs, jobs);
  if (command == "norm") return compute_norm(args, inputs);
  if (command == "osdist") return compute_osdist(args, inputs, jobs);
  if (command == "family") return compute_wt(args, jobs, code);
  if (command == "gh-dist") return compute_gh(args, inputs);
  if (command == "gh-theory") return compute_theory(args, inputs);
  throw InvalidInput("unknown command '" + command + "'");
}

Json verify_report(const Json& report, int jobs, bool& ok) {
  if (!report.is_object() || !report.contains("command") || !report.contains("result"))
    throw InvalidInput("verify: not a report");
  const auto command = report["command"].get<std::string>();
  const Json& args = report.at("args");
  const Json inputs = report.value("inputs", Json::object());
  const Json& res = report["result"];
  Checks c;
  int code = kOk;
  const Json again = compute(command, args, inputs, jobs, code);
  c.add("recomputed result matches the stored result", dump(again) == dump(res));
  if (command == "unitary-cois") check_cois(args, inputs, res, c);
  if (command == "deg1") check_deg1(inputs, res, c);
  if (command == "family") check_wt(args, res, c);
  if (command == "osdist") check_osdist(inputs, res, c);
  if (command == "gh-dist") check_gh(inputs, res, c);
  ok = c.ok;
  return Json{{"command", "verify"}, {"report_command", command}, {"ok", c.ok}, {"checks", c.list}};
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invariants and distances for finite-dimensional operator systems", "osinv"};
  app.require_subcommand(1);
  int jobs = 1;
  bool timing = false;
  app.add_option("--jobs,-j", jobs, "Worker threads for parallel searches")->check(CLI::Range(1, 256));
  app.add_flag("--timing", timing, "Add wall time to the report");

  Invocation inv;
  std::string f1, f2, element, variant = "3x3", family_name, report_path;
  double tol = unitary::kAngleTol, span_tol = linalg::kDefaultTol, t = 0.0, s = 0.0;
  double deg_tol = degree1::kDefaultTol, wt_tol = 1e-12;
  int cap = unitary::kDefaultOracleCap, deg_cap = 0, level = 1, levels = 2, restarts = 8;
  int max_evals = 1500, wt_restarts = 128, kmax = 1, gh_cap = metricgh::kDefaultCap, depth = 1;
  std::uint64_t seed = 0;
  bool oracle = false;

  auto* spectrum = app.add_subcommand("spectrum", "Spectrum of a unitary as a circle set");
  spectrum->add_option("U", f1, "Unitary matrix file")->required();
  spectrum->add_option("--tol", tol, "Angular tolerance");
  auto* canon = app.add_subcommand("canon", "Canonical gap necklace of a unitary's spectrum");
  canon->add_option("U", f1, "Unitary matrix file")->required();
  canon->add_option("--tol", tol, "Angular tolerance");
  auto* cois = app.add_subcommand("unitary-cois", "Complete order isomorphism of span{I, U, U*}");
  cois->add_option("U", f1)->required();
  cois->add_option("V", f2)->required();
  cois->add_flag("--oracle", oracle, "Run the exhaustive bijection oracle");
  cois->add_option("--tol", tol, "Angular tolerance");
  cois->add_option("--span-tol", span_tol, "Relative residual tolerance of span tests");
  cois->add_option("--cap", cap, "Largest spectrum the oracle enumerates");
  auto* deg1 = app.add_subcommand("deg1", "Degree-1 homeomorphism of finite point sets");
  deg1->add_option("D", f1)->required();
  deg1->add_option("E", f2)->required();
  deg1->add_option("--cap", deg_cap, "Largest point set enumerated (0 = default)");
  deg1->add_option("--tol", deg_tol, "Residual tolerance");
  auto* norm = app.add_subcommand("norm", "Norm of a matrix over an operator system");
  norm->add_option("SYS", f1)->required();
  norm->add_option("--element", element, "Block matrix file")->required();
  norm->add_option("--level", level, "Matrix level n");
  auto* osd = app.add_subcommand("osdist", "Estimated level distances between two systems");
  osd->add_option("X", f1)->required();
  osd->add_option("Y", f2)->required();
  osd->add_option("--levels", levels, "Largest level");
  osd->add_option("--restarts", restarts, "Restarts per level");
  osd->add_option("--seed", seed, "Random seed");
  osd->add_option("--max-evals", max_evals, "Simplex evaluations per search round");
  auto* family = app.add_subcommand("family", "Classify members of a parametrized family");
  family->add_option("NAME", family_name)->required()->check(CLI::IsMember({"wt"}));
  family->add_option("--variant", variant)->check(CLI::IsMember({"3x3", "2x2"}));
  family->add_option("--t", t)->required();
  family->add_option("--s", s)->required();
  family->add_option("--tol", wt_tol, "Equality tolerance for the 3x3 family");
  family->add_option("--restarts", wt_restarts, "Restarts of the 2x2 search");
  family->add_option("--seed", seed, "Random seed of the 2x2 search");
  auto* gh = app.add_subcommand("gh-dist", "Gromov-Hausdorff distance of finite structures");
  gh->add_option("M", f1)->required();
  gh->add_option("N", f2)->required();
  gh->add_option("--kmax", kmax, "Largest domain level");
  gh->add_option("--cap", gh_cap, "Largest domain enumerated");
  auto* theory = app.add_subcommand("gh-theory", "Universal-theory fingerprint of a structure");
  theory->add_option("M", f1)->required();
  theory->add_option("--depth", depth, "Fingerprint depth");
  auto* verify = app.add_subcommand("verify", "Replay a report and re-check its certificates");
  verify->add_option("REPORT", report_path)->required();

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    out << dump(error_object("usage", e.what(), kInvalid));
    return kInvalid;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    auto* sub = app.get_subcommands().front();
    inv.command = sub->get_name();
    if (sub == spectrum || sub == canon) {
      inv.args = Json{{"tol", tol}};
      inv.files = {{"u", f1}};
    } else if (sub == cois) {
      inv.args = Json{{"oracle", oracle}, {"tol", tol}, {"span_tol", span_tol}, {"cap", cap}};
      inv.files = {{"u", f1}, {"v", f2}};
    } else if (sub == deg1) {
      inv.args = Json{{"tol", deg_tol}, {"cap", deg_cap}};
      inv.files = {{"d", f1}, {"e", f2}};
    } else if (sub == norm) {
      inv.args = Json{{"level", level}};
      inv.files = {{"system", f1}, {"element", element}};
    } else if (sub == osd) {
      inv.args = Json{{"levels", levels}, {"restarts", restarts}, {"seed", seed}, {"max_evals", max_evals}};
      inv.files = {{"x", f1}, {"y", f2}};
    } else if (sub == family) {
      inv.args = Json{{"family", family_name}, {"variant", variant}, {"t", t}, {"s", s},
                      {"tol", wt_tol}, {"restarts", wt_restarts}, {"seed", seed}};
    } else if (sub == gh) {
      inv.args = Json{{"kmax", kmax}, {"cap", gh_cap}};
      inv.files = {{"m", f1}, {"n", f2}};
    } else if (sub == theory) {
      inv.args = Json{{"depth", depth}};
      inv.files = {{"m", f1}};
    } else if (sub == verify) {
      bool ok = false;
      const Json result = verify_report(read_json_file(report_path), jobs, ok);
      out << dump(result);
      if (!ok) err << "osinv: verification failed\n";
      return ok ? kOk : kInvalid;
    }

    Json inputs = Json::object();
    for (const auto& [role, path] : inv.files) inputs[role] = read_json_file(path);
    int code = kOk;
    Json result = compute(inv.command, inv.args, inputs, jobs, code);
    Json report{{"command", inv.command}, {"args", inv.args}, {"inputs", inputs}, {"result", result}};
    if (timing) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - started;
      report["wall_time_s"] = dt.count();
    }
    out << dump(report);
    return code;
  } catch (const CapacityError& e) {
    Json obj = error_object("capacity", e.what(), kCapacity);
    obj["error"]["requested"] = e.requested();
    obj["error"]["cap"] = e.cap();
    out << dump(obj);
    return kCapacity;
  } catch (const NotUnitaryError& e) {
    Json obj = error_object("not-unitary", e.what(), kInvalid);
    obj["error"]["defect"] = num(e.defect());
    out << dump(obj);
    return kInvalid;
  } catch (const NotNormalError& e) {
    Json obj = error_object("not-normal", e.what(), kInvalid);
    obj["error"]["defect"] = num(e.defect());
    out << dump(obj);
    return kInvalid;
  } catch (const NotComparableError& e) {
    out << dump(error_object("not-comparable", e.what(), kInvalid));
    return kInvalid;
  } catch (const Error& e) {
    out << dump(error_object("invalid-input", e.what(), kInvalid));
    return kInvalid;
  } catch (const nlohmann::json::exception& e) {
    out << dump(error_object("invalid-input", e.what(), kInvalid));
    return kInvalid;
  }
}

}  // namespace osinv::cli
