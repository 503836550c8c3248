#include "homvol/certificates.hpp"
#include "homvol/errors.hpp"
#include "homvol/serialize.hpp"
#include "homvol/solvers.hpp"
#include "homvol/volume.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace homvol;

namespace {

EngineConfig engine(const std::string &backend, std::int64_t budget, std::uint64_t seed) {
  EngineConfig c;
  c.backend = backend_from_string(backend);
  c.budget = budget;
  c.seed = seed;
  return c;
}

std::string volume_json(const std::string &doc, const std::string &backend, std::int64_t budget,
                        std::uint64_t seed) {
  const Polynomial g = parse_polynomial(doc);
  const VolumeEstimate v = volume(g, engine(backend, budget, seed));
  Json j;
  j["value"] = v.value;
  j["std_error"] = v.std_error;
  j["backend"] = to_string(v.backend);
  j["samples_or_nodes"] = v.samples_or_nodes;
  return j.dump();
}

std::string moments_json(const std::string &doc, const std::string &max_order,
                         const std::string &backend, std::int64_t budget, std::uint64_t seed) {
  const Polynomial g = parse_polynomial(doc);
  const Rational r = Rational::parse(max_order);
  if (r.num < 0 || (r.num * g.q()) % r.den != 0)
    throw std::invalid_argument("max_order " + max_order + " is not on the lattice");
  const MomentTable t =
      moments_up_to(g, static_cast<int>(r.num * g.q() / r.den), engine(backend, budget, seed));
  Json rows = Json::array();
  for (const auto &[a, e] : t.entries)
    rows.push_back({{"alpha_times_q", a}, {"value", e.value}, {"std_error", e.std_error}});
  Json j;
  j["q"] = t.q;
  j["region"] = t.region;
  j["entries"] = rows;
  return j.dump();
}

std::string solve_json(const std::string &problem, int n, const std::string &d, int q,
                       std::optional<double> target_volume, const std::string &backend,
                       std::int64_t budget, std::uint64_t seed) {
  SolveConfig cfg;
  cfg.engine = engine(backend, budget, seed);
  cfg.target_volume = target_volume;
  const Rational deg = Rational::parse(d);
  SolveResult r;
  if (problem == "p1" || problem == "p1q")
    r = solve_p1(n, deg, q, {}, cfg);
  else if (problem == "p2")
    r = solve_p2(n, deg, q, {}, cfg);
  else if (problem == "p3" && deg.is_integer())
    r = solve_p3(n, static_cast<int>(deg.num), {}, cfg);
  else
    throw std::invalid_argument("unknown problem '" + problem + "'");
  return to_json(r).dump();
}

std::string certify_json(const std::string &doc, std::string problem, double tol,
                         const std::string &backend, std::int64_t budget, std::uint64_t seed) {
  const Json j = parse_document(doc);
  const EngineConfig ec = engine(backend, budget, seed);
  if (is_gram_document(j)) {
    const GramForm f = gram_from_json(j);
    return to_json(certify_p3(f, moment_matrix(expand_gram(f), f.d() / 2, ec), tol)).dump();
  }
  const Polynomial g = polynomial_from_json(j);
  if (problem.empty())
    problem = g.convention() == Convention::multinomial ? "p2" : "p1";
  const MomentTable t = basis_moments(g, ec);
  if (problem == "p1")
    return to_json(certify_p1(g, t, tol)).dump();
  if (problem == "p2")
    return to_json(certify_p2(g.q() == 1 ? to_convention(g, Convention::multinomial) : g, t, tol)).dump();
  throw std::invalid_argument("unknown problem '" + problem + "'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "volumes, moments and extremal representations of homogeneous polynomials";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ArithmeticError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

  m.attr("DEFAULT_SEED") = kDefaultSeed;

  m.def("ball_volume", [](int n, const std::string &d) { return closed_form_ball_volume(n, Rational::parse(d)); },
        py::arg("n"), py::arg("d"));
  m.def("ball_moment", [](int n, const std::string &d) { return closed_form_ball_moment(n, Rational::parse(d)); },
        py::arg("n"), py::arg("d"));
  m.def("sphere_minimum",
        [](const std::string &doc) { return finite_volume_test(parse_polynomial(doc)).sphere_minimum; },
        py::arg("doc"));
  m.def("volume", &volume_json, py::arg("doc"), py::arg("backend") = "spherical",
        py::arg("budget") = 0, py::arg("seed") = kDefaultSeed);
  m.def("moments", &moments_json, py::arg("doc"), py::arg("max_order"),
        py::arg("backend") = "spherical", py::arg("budget") = 0, py::arg("seed") = kDefaultSeed);
  m.def("solve", &solve_json, py::arg("problem"), py::arg("n"), py::arg("d"), py::arg("q") = 1,
        py::arg("target_volume") = py::none(), py::arg("backend") = "spherical",
        py::arg("budget") = 0, py::arg("seed") = kDefaultSeed);
  m.def("certify", &certify_json, py::arg("doc"), py::arg("problem") = "", py::arg("tol") = 1e-6,
        py::arg("backend") = "spherical", py::arg("budget") = 0, py::arg("seed") = kDefaultSeed);
}
