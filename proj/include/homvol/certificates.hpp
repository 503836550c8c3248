#pragma once

#include "homvol/linalg.hpp"
#include "homvol/polynomial.hpp"
#include "homvol/serialize.hpp"
#include "homvol/volume.hpp"

#include <map>
#include <string>

namespace homvol {

enum class CertificateKind { p1_kkt, p2_moment, p3_psd };

std::string to_string(CertificateKind k);

struct Certificate {
  CertificateKind kind = CertificateKind::p1_kkt;
  std::map<std::string, double> residuals;
  // slack added to tol for each residual (three propagated standard errors)
  std::map<std::string, double> allowances;
  std::map<std::string, double> duals;
  std::map<std::string, Matrix> matrix_duals;
  double tolerance = 0.0;
  bool pass = false;

  /// Throws std::out_of_range for an unknown name.
  double residual(const std::string &name) const;
  double max_residual() const;
};

/// KKT check for the l1 problem using the explicit dual construction
/// theta = (d/(n+d)) / max_i int |x_i|^d, t_a = theta (n+d)/d int x^a,
/// u = max(t, 0), v = max(-t, 0), psi = 1 - |t|.
Certificate certify_p1(const Polynomial &g, const MomentTable &moments, double tol = 1e-6);

/// Moment proportionality g_a = l2 (n+d)/n m_a / vol for the weighted l2
/// problem. q = 1 requires multinomial-convention input; q > 1 uses plain
/// coefficients and the unweighted norm.
Certificate certify_p2(const Polynomial &g, const MomentTable &moments, double tol = 1e-6);

/// PSD check of A = I - ((n+d) trace(Q) / (n rho_d)) M together with
/// |<Q, A>|. Throws PreconditionError when vol(G_Q) differs from rho_d.
Certificate certify_p3(const GramForm &form, const MomentMatrix &m, double tol = 1e-6);

struct RefutationReport {
  bool applicable = false; // d >= 4
  double min_eigenvalue = 0.0;
  Certificate certificate;
};

/// Runs certify_p3 on the minimal-trace Gram form of sum x_i^d.
RefutationReport refute_ld_for_p3(int n, int d, const EngineConfig &cfg = {},
                                  double tol = 1e-6);

Json to_json(const Certificate &c);

} // namespace homvol
