#include "homvol/cli.hpp"

#include "homvol/certificates.hpp"
#include "homvol/errors.hpp"
#include "homvol/serialize.hpp"
#include "homvol/solvers.hpp"
#include "homvol/volume.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace homvol {

namespace {

struct Flags {
  std::string backend;
  std::int64_t budget = 0;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> tol;
  std::string out_path;
  std::string format;
  bool force = false;
};

// Failure with a chosen exit code.
struct CliFailure {
  int code;
  std::string message;
};

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw CliFailure{exit_input, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EngineConfig engine_for(const Flags &f, int n) {
  EngineConfig ec;
  if (f.backend.empty())
    ec.backend = n <= 3 ? Backend::spherical : Backend::monte_carlo;
  else
    ec.backend = backend_from_string(f.backend);
  ec.budget = f.budget;
  ec.seed = f.seed;
  return ec;
}

void emit_text(const Flags &f, const std::string &text, std::ostream &out) {
  if (f.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(f.out_path, std::ios::binary);
  if (!file)
    throw CliFailure{exit_input, "cannot write '" + f.out_path + "'"};
  file << text;
}

void require_finite(const Polynomial &g, const Flags &f) {
  if (f.force)
    return;
  const FeasibilityVerdict v = finite_volume_test(g, 16, f.seed);
  if (!v.finite_volume) {
    std::ostringstream os;
    os << "sublevel set has infinite volume (sphere minimum " << v.sphere_minimum << ")";
    throw CliFailure{exit_infeasible, os.str()};
  }
}

int cmd_volume(const std::string &path, const Flags &f, std::ostream &out) {
  const Polynomial g = parse_polynomial(read_file(path));
  require_finite(g, f);
  const VolumeEstimate v = volume(g, engine_for(f, g.n()));
  Json j;
  j["value"] = v.value;
  j["std_error"] = v.std_error;
  j["backend"] = to_string(v.backend);
  j["samples_or_nodes"] = v.samples_or_nodes;
  out << j.dump(2) << "\n";
  return exit_ok;
}

int cmd_moments(const std::string &path, const std::string &order, const Flags &f,
                std::ostream &out) {
  const Polynomial g = parse_polynomial(read_file(path));
  require_finite(g, f);
  const Rational r = Rational::parse(order);
  if (r.num < 0 || (r.num * g.q()) % r.den != 0)
    throw CliFailure{exit_input, "--max-order " + order + " is not on the lattice with q = " +
                                     std::to_string(g.q())};
  const int max_total = static_cast<int>(r.num * g.q() / r.den);
  const MomentTable t = moments_up_to(g, max_total, engine_for(f, g.n()));
  if (f.format == "json") {
    Json j;
    j["region"] = t.region;
    j["backend"] = to_string(t.normalization.backend);
    j["q"] = t.q;
    Json rows = Json::array();
    for (const auto &[a, e] : t.entries)
      rows.push_back({{"alpha_times_q", a}, {"value", e.value}, {"std_error", e.std_error}});
    j["entries"] = rows;
    emit_text(f, j.dump(2) + "\n", out);
  } else {
    emit_text(f, to_csv(t), out);
  }
  return exit_ok;
}

int cmd_solve(const std::string &problem, int n, const std::string &d_text, int q,
              const std::string &start_path, std::optional<double> target, int max_iters,
              const Flags &f, std::ostream &out) {
  const Rational d = Rational::parse(d_text);
  SolveConfig cfg;
  cfg.engine = engine_for(f, n);
  if (f.tol)
    cfg.certificate_tol = *f.tol;
  cfg.target_volume = target;
  if (max_iters > 0)
    cfg.max_iters = max_iters;
  SolveResult r;
  if (problem == "p1" || problem == "p1q" || problem == "p2") {
    std::optional<Polynomial> start;
    if (!start_path.empty())
      start = parse_polynomial(read_file(start_path));
    if (problem == "p1q" && q == 1)
      throw CliFailure{exit_input, "p1q needs --q > 1"};
    r = problem == "p2" ? solve_p2(n, d, q, start, cfg) : solve_p1(n, d, q, start, cfg);
  } else if (problem == "p3") {
    if (!d.is_integer())
      throw CliFailure{exit_input, "p3 needs an even integer degree"};
    std::optional<GramForm> start;
    if (!start_path.empty())
      start = parse_gram(read_file(start_path));
    r = solve_p3(n, static_cast<int>(d.num), start, cfg);
  } else {
    throw CliFailure{exit_input, "unknown problem '" + problem + "' (expected p1, p1q, p2, p3)"};
  }
  out << to_json(r).dump(2) << "\n";
  if (!r.converged)
    return exit_unconverged;
  if (!r.certificate.pass)
    return exit_certificate_fail;
  return exit_ok;
}

int cmd_certify(const std::string &path, std::string problem, const Flags &f, std::ostream &out) {
  const Json doc = parse_document(read_file(path));
  const double tol = f.tol ? *f.tol : 1e-6;
  Certificate c;
  if (is_gram_document(doc)) {
    const GramForm form = gram_from_json(doc);
    if (!problem.empty() && problem != "p3")
      throw CliFailure{exit_input, "a Gram document can only be certified for p3"};
    const Polynomial g = expand_gram(form);
    require_finite(g, f);
    c = certify_p3(form, moment_matrix(g, form.d() / 2, engine_for(f, form.n())), tol);
  } else {
    const Polynomial g = polynomial_from_json(doc);
    if (problem.empty())
      problem = g.convention() == Convention::multinomial ? "p2" : "p1";
    require_finite(g, f);
    const MomentTable t = basis_moments(g, engine_for(f, g.n()));
    if (problem == "p1" || problem == "p1q")
      c = certify_p1(g, t, tol);
    else if (problem == "p2" || problem == "p2q")
      c = certify_p2(g.q() == 1 ? to_convention(g, Convention::multinomial) : g, t, tol);
    else
      throw CliFailure{exit_input, "unknown problem '" + problem + "' for a polynomial document"};
  }
  out << to_json(c).dump(2) << "\n";
  return c.pass ? exit_ok : exit_certificate_fail;
}

std::vector<int> parse_range(const std::string &text) {
  std::vector<int> v;
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      v.push_back(std::stoi(text));
    } else {
      const int lo = std::stoi(text.substr(0, colon));
      const int hi = std::stoi(text.substr(colon + 1));
      for (int k = lo; k <= hi; ++k)
        v.push_back(k);
    }
  } catch (const std::exception &) {
    throw CliFailure{exit_input, "bad --n-range '" + text + "' (expected N or LO:HI)"};
  }
  if (v.empty() || v.front() < 1)
    throw CliFailure{exit_input, "--n-range needs n >= 1"};
  return v;
}

int cmd_ball_table(const std::string &n_range, const std::string &d_list, const Flags &f,
                   std::ostream &out) {
  std::vector<Rational> ds;
  std::stringstream ss(d_list);
  for (std::string item; std::getline(ss, item, ',');) {
    const Rational d = Rational::parse(item);
    if (d.num <= 0)
      throw CliFailure{exit_input, "degrees in --d-list must be positive"};
    ds.push_back(d);
  }
  std::string csv = "n;d;volume;axis_moment\n";
  for (int n : parse_range(n_range))
    for (const Rational &d : ds)
      csv += std::to_string(n) + ";" + d.str() + ";" + fmt(closed_form_ball_volume(n, d)) + ";" +
             fmt(closed_form_ball_moment(n, d)) + "\n";
  emit_text(f, csv, out);
  return exit_ok;
}

int cmd_boundary(const std::string &path, int count, const Flags &f, std::ostream &out) {
  const Polynomial g = parse_polynomial(read_file(path));
  if (g.n() != 2)
    throw CliFailure{exit_input, "boundary sampling needs n = 2 (got n = " + std::to_string(g.n()) + ")"};
  if (count < 1)
    throw CliFailure{exit_input, "--count must be >= 1"};
  const double d = g.degree().value();
  std::string csv = "x;y\n";
  for (int k = 0; k < count; ++k) {
    const double th = 2.0 * std::numbers::pi * k / count;
    const double x[2] = {std::cos(th), std::sin(th)};
    const double h = evaluate(g, x);
    if (!(h > 0.0))
      continue;
    const double r = std::pow(h, -1.0 / d);
    csv += fmt(r * x[0]) + ";" + fmt(r * x[1]) + "\n";
  }
  emit_text(f, csv, out);
  return exit_ok;
}

void add_engine_flags(CLI::App *sub, Flags &f) {
  sub->add_option("--backend", f.backend, "spherical, mc or grid")
      ->check(CLI::IsMember({"spherical", "mc", "grid", "monte_carlo", "grid_oracle", "closed_form"}));
  sub->add_option("--budget", f.budget, "nodes, samples or grid points per axis")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "random seed");
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Volumes, moments and extremal problems for homogeneous polynomials", "homvol"};
  app.require_subcommand(1);
  Flags f;

  std::string path, order = "0", problem, start_path, d_text = "4", n_range = "1:3",
                    d_list = "1/2,1,2,4";
  int n = 2, q = 1, count = 360, max_iters = 0;
  std::optional<double> target;

  auto *vol = app.add_subcommand("volume", "volume of {g <= 1}");
  vol->add_option("file", path, "polynomial JSON")->required();
  add_engine_flags(vol, f);
  vol->add_flag("--force", f.force, "skip the finite-volume test");
  vol->add_option("--format", f.format)->check(CLI::IsMember({"json"}));

  auto *mom = app.add_subcommand("moments", "moment table up to a total degree");
  mom->add_option("file", path, "polynomial JSON")->required();
  mom->add_option("--max-order", order, "largest total degree, e.g. 4 or 1/2")->required();
  add_engine_flags(mom, f);
  mom->add_flag("--force", f.force, "skip the finite-volume test");
  mom->add_option("--out", f.out_path, "CSV destination");
  mom->add_option("--format", f.format)->check(CLI::IsMember({"csv", "json"}));

  auto *sol = app.add_subcommand("solve", "solve p1, p1q, p2 or p3");
  sol->add_option("problem", problem, "p1, p1q, p2 or p3")->required();
  sol->add_option("--n", n, "dimension")->check(CLI::PositiveNumber);
  sol->add_option("--d", d_text, "degree, e.g. 4 or 1/2");
  sol->add_option("--q", q, "lattice denominator")->check(CLI::PositiveNumber);
  sol->add_option("--start", start_path, "start polynomial or Gram JSON");
  sol->add_option("--target-volume", target, "volume of the rescaled solution");
  sol->add_option("--max-iters", max_iters)->check(CLI::PositiveNumber);
  add_engine_flags(sol, f);
  sol->add_option("--tol", f.tol, "certificate tolerance")->check(CLI::PositiveNumber);
  sol->add_option("--format", f.format)->check(CLI::IsMember({"json"}));

  auto *cert = app.add_subcommand("certify", "optimality certificate for a candidate");
  cert->add_option("file", path, "polynomial or Gram JSON")->required();
  cert->add_option("--problem", problem, "p1, p2 or p3");
  add_engine_flags(cert, f);
  cert->add_option("--tol", f.tol, "certificate tolerance")->check(CLI::PositiveNumber);
  cert->add_flag("--force", f.force, "skip the finite-volume test");
  cert->add_option("--format", f.format)->check(CLI::IsMember({"json"}));

  auto *ball = app.add_subcommand("ball-table", "closed-form L_d ball volumes and axis moments");
  ball->add_option("--n-range", n_range, "N or LO:HI");
  ball->add_option("--d-list", d_list, "comma-separated degrees");
  ball->add_option("--out", f.out_path, "CSV destination");
  ball->add_option("--format", f.format)->check(CLI::IsMember({"csv"}));

  auto *bnd = app.add_subcommand("boundary", "points on {g = 1} for n = 2");
  bnd->add_option("file", path, "polynomial JSON")->required();
  bnd->add_option("--count", count, "number of angles")->check(CLI::PositiveNumber);
  bnd->add_option("--out", f.out_path, "CSV destination");
  bnd->add_option("--format", f.format)->check(CLI::IsMember({"csv"}));

  std::vector<const char *> argv{"homvol"};
  for (const auto &a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  }

  try {
    if (*vol)
      return cmd_volume(path, f, out);
    if (*mom)
      return cmd_moments(path, order, f, out);
    if (*sol)
      return cmd_solve(problem, n, d_text, q, start_path, target, max_iters, f, out);
    if (*cert)
      return cmd_certify(path, problem, f, out);
    if (*ball)
      return cmd_ball_table(n_range, d_list, f, out);
    if (*bnd)
      return cmd_boundary(path, count, f, out);
  } catch (const CliFailure &e) {
    err << "error: " << e.message << "\n";
    return e.code;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const InfeasibleError &e) {
    err << "error: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const DivergenceError &e) {
    err << "error: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const PreconditionError &e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::out_of_range &e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::overflow_error &e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  }
  return exit_input;
}

} // namespace homvol
