#include "homvol/certificates.hpp"

#include "homvol/errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace homvol {

std::string to_string(CertificateKind k) {
  switch (k) {
  case CertificateKind::p1_kkt:
    return "p1_kkt";
  case CertificateKind::p2_moment:
    return "p2_moment";
  case CertificateKind::p3_psd:
    return "p3_psd";
  }
  return "unknown";
}

double Certificate::residual(const std::string &name) const {
  auto it = residuals.find(name);
  if (it == residuals.end())
    throw std::out_of_range("certificate has no residual named '" + name + "'");
  return it->second;
}

double Certificate::max_residual() const {
  double m = 0.0;
  for (const auto &[name, r] : residuals)
    m = std::max(m, r);
  return m;
}

namespace {

std::string index_label(const MultiIndex &a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (i ? "," : "") + std::to_string(a[i]);
  return s + ")";
}

void decide(Certificate &c) {
  c.pass = true;
  for (const auto &[name, r] : c.residuals) {
    const auto it = c.allowances.find(name);
    const double slack = it == c.allowances.end() ? 0.0 : it->second;
    if (!(r <= c.tolerance + slack))
      c.pass = false;
  }
}

void check_tol(double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("certificate tolerance must be positive");
}

MultiIndex axis_index(int n, int i, int dq) {
  MultiIndex a(static_cast<std::size_t>(n), 0);
  a[static_cast<std::size_t>(i)] = dq;
  return a;
}

} // namespace

Certificate certify_p1(const Polynomial &g, const MomentTable &moments, double tol) {
  check_tol(tol);
  const int n = g.n();
  const double d = g.degree().value();
  Certificate c;
  c.kind = CertificateKind::p1_kkt;
  c.tolerance = tol;

  double axis = 0.0, axis_se = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto &e = moments.at(axis_index(n, i, g.degree_times_q()));
    if (e.value > axis) {
      axis = e.value;
      axis_se = e.std_error;
    }
  }
  if (!(axis > 0.0))
    throw PreconditionError("axis moments must be positive");
  const double theta = (d / (n + d)) / axis;
  c.duals["theta"] = theta;

  const Polynomial gm = to_convention(g, Convention::monomial);
  double dual_sign = 0.0, dominance = 0.0, comp = 0.0;
  double dominance_se = 0.0, comp_se = 0.0;
  for (const auto &a : g.basis()) {
    const auto &m = moments.at(a);
    const double t = m.value / axis;
    const double t_se = std::hypot(m.std_error, t * axis_se) / axis;
    const double u = std::max(t, 0.0);
    const double v = std::max(-t, 0.0);
    const double psi = 1.0 - u - v;
    const double lam = std::abs(gm.coeff(a));
    const std::string label = index_label(a);
    c.duals["u" + label] = u;
    c.duals["v" + label] = v;
    c.duals["psi" + label] = psi;
    dual_sign = std::max({dual_sign, -u, -v});
    if (-psi > dominance) {
      dominance = -psi;
      dominance_se = t_se;
    }
    const double g_a = gm.coeff(a);
    const double slack = lam * std::abs(psi) + u * (lam - g_a) + v * (lam + g_a);
    if (slack > comp) {
      comp = slack;
      comp_se = lam * t_se;
    }
  }
  const double rho = closed_form_ball_volume(n, d);
  const auto &vol = moments.normalization;
  c.residuals["volume"] = std::abs(vol.value - rho) / rho;
  c.allowances["volume"] = 3.0 * vol.std_error / rho;
  c.residuals["dual_sign"] = dual_sign;
  c.residuals["dominance"] = dominance;
  c.allowances["dominance"] = 3.0 * dominance_se;
  c.residuals["complementarity"] = comp;
  c.allowances["complementarity"] = 3.0 * comp_se;
  decide(c);
  return c;
}

Certificate certify_p2(const Polynomial &g, const MomentTable &moments, double tol) {
  check_tol(tol);
  const bool lattice = g.q() > 1;
  if (!lattice && g.convention() != Convention::multinomial)
    throw std::invalid_argument("certify_p2 expects multinomial-convention coefficients");
  if (lattice && g.convention() != Convention::monomial)
    throw std::invalid_argument("certify_p2 on a lattice polynomial expects monomial convention");
  const int n = g.n();
  const double d = g.degree().value();
  Certificate c;
  c.kind = CertificateKind::p2_moment;
  c.tolerance = tol;

  double l2 = 0.0;
  for (const auto &[a, coeff] : g.terms())
    l2 += (lattice ? 1.0 : static_cast<double>(multinomial_coefficient(a))) * coeff * coeff;
  const auto &vol = moments.normalization;
  if (!(vol.value > 0.0))
    throw PreconditionError("volume must be positive");
  c.duals["l2_star"] = l2;
  c.duals["lambda_star"] = 2.0 * l2 * d / (n * vol.value);
  const double scale = l2 * (n + d) / n;

  double min_even = std::numeric_limits<double>::infinity();
  for (const auto &a : g.basis()) {
    const auto &m = moments.at(a);
    const double target = scale * m.value / vol.value;
    const std::string name = "alpha" + index_label(a);
    c.residuals[name] = std::abs(g.coeff(a) - target);
    c.allowances[name] =
        3.0 * scale * std::hypot(m.std_error / vol.value, m.value * vol.std_error / (vol.value * vol.value));
    c.duals["target" + index_label(a)] = target;
    bool even = true;
    for (int e : a)
      even = even && (lattice || e % 2 == 0);
    if (even)
      min_even = std::min(min_even, g.coeff(a));
  }
  // coefficients at even indices of an optimum are strictly positive
  c.duals["min_even_coefficient"] = min_even;
  c.residuals["even_positivity"] = std::max(0.0, -min_even);
  decide(c);
  if (!(min_even > 0.0))
    c.pass = false;
  return c;
}

Certificate certify_p3(const GramForm &form, const MomentMatrix &m, double tol) {
  check_tol(tol);
  const Matrix &q = form.Q();
  if (m.values.rows() != q.rows() || m.values.cols() != q.cols())
    throw std::invalid_argument("moment matrix is " + std::to_string(m.values.rows()) + "x" +
                                std::to_string(m.values.cols()) + " but Q is " +
                                std::to_string(q.rows()) + "x" + std::to_string(q.cols()));
  const int n = form.n();
  const int d = form.d();
  const double rho = closed_form_ball_volume(n, static_cast<double>(d));
  const double vol_dev = std::abs(m.volume.value - rho) / rho;
  if (vol_dev > tol + 3.0 * m.volume.std_error / rho) {
    std::ostringstream os;
    os << "volume of the candidate's sublevel set is " << m.volume.value
       << ", expected the unit-ball volume " << rho;
    throw PreconditionError(os.str());
  }
  Certificate c;
  c.kind = CertificateKind::p3_psd;
  c.tolerance = tol;

  const double tr = q.trace();
  const double factor = (n + d) * tr / (n * rho);
  Matrix a = Matrix::identity(q.rows()) - factor * m.values;
  const EigenDecomposition eig = jacobi_eigen(a);
  const double min_eig = eig.values.empty() ? 0.0 : eig.values.front();
  const double comp = inner(q, a);

  double se_frob = 0.0, comp_se = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) {
      const double se = factor * m.std_errors(i, j);
      se_frob += se * se;
      comp_se += std::abs(q(i, j)) * se;
    }
  c.residuals["min_eigenvalue"] = std::max(0.0, -min_eig);
  c.allowances["min_eigenvalue"] = 3.0 * std::sqrt(se_frob);
  c.residuals["complementarity"] = std::abs(comp);
  c.allowances["complementarity"] = 3.0 * comp_se;
  c.duals["lambda"] = d * tr / (n * rho);
  c.duals["min_eigenvalue"] = min_eig;
  c.duals["Psi_norm"] = a.frobenius_norm();
  c.matrix_duals["Psi"] = a;
  Matrix spectrum(1, eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i)
    spectrum(0, i) = eig.values[i];
  c.matrix_duals["Psi_spectrum"] = spectrum;
  decide(c);
  return c;
}

RefutationReport refute_ld_for_p3(int n, int d, const EngineConfig &cfg, double tol) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("refute_ld_for_p3 needs an even degree d >= 2");
  RefutationReport r;
  r.applicable = d >= 4;
  const GramForm form = ld_gram(n, d);
  const Polynomial g = expand_gram(form);
  const MomentMatrix m = moment_matrix(g, d / 2, cfg);
  r.certificate = certify_p3(form, m, tol);
  r.min_eigenvalue = r.certificate.duals.at("min_eigenvalue");
  return r;
}

namespace {
Json matrix_json(const Matrix &m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}
} // namespace

Json to_json(const Certificate &c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["verdict"] = c.pass ? "pass" : "fail";
  j["tolerance"] = c.tolerance;
  j["residuals"] = Json::object();
  for (const auto &[k, v] : c.residuals)
    j["residuals"][k] = v;
  j["duals"] = Json::object();
  for (const auto &[k, v] : c.duals)
    j["duals"][k] = v;
  for (const auto &[k, v] : c.matrix_duals)
    j["duals"][k] = matrix_json(v);
  j["allowances"] = Json::object();
  for (const auto &[k, v] : c.allowances)
    j["allowances"][k] = v;
  return j;
}

} // namespace homvol
