#pragma once

#include "homvol/linalg.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homvol {

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den = 1);
  /// Accepts "4", "1/2", " 3 / 8 ".
  static Rational parse(std::string_view text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  bool is_even_integer() const { return den == 1 && num % 2 == 0; }
  std::string str() const;

  friend bool operator==(const Rational &, const Rational &) = default;
};

/// Exponent numerators over a polynomial-wide lattice denominator q:
/// the exponent vector is (alpha[0]/q, ..., alpha[n-1]/q).
using MultiIndex = std::vector<int>;

/// Graded order: lower total first, then lexicographically descending.
/// Within one degree this is the canonical enumeration order.
struct CanonicalOrder {
  bool operator()(const MultiIndex &a, const MultiIndex &b) const;
};

int total(const MultiIndex &alpha);
bool has_odd_entry(const MultiIndex &alpha);

/// All non-negative integer vectors of length n summing to d_times_q, in
/// lexicographically descending order. The count is C(n-1+dq, dq).
std::vector<MultiIndex> enumerate_indices(int n, int d_times_q, int q = 1);

/// d!/(alpha_1! ... alpha_n!) for integer exponents. Throws for q != 1.
std::uint64_t multinomial_coefficient(const MultiIndex &alpha, int q = 1);

enum class Convention { monomial, multinomial };

std::string to_string(Convention c);
Convention convention_from_string(std::string_view s);

struct Term {
  MultiIndex alpha;
  double coeff = 0.0;
};

/// Positively homogeneous (generalized) polynomial sum_alpha g_alpha m_alpha(x)
/// with m_alpha(x) = x^alpha when q = 1 and d is an even integer and
/// |x|^(alpha/q) otherwise. In the multinomial convention each stored
/// coefficient multiplies c_alpha x^alpha (q = 1 only).
class Polynomial {
public:
  using TermMap = std::map<MultiIndex, double, CanonicalOrder>;

  Polynomial(int n, Rational degree, int q, std::vector<Term> terms,
             Convention convention = Convention::monomial);

  static Polynomial from_dense(int n, Rational degree, int q,
                               std::span<const double> coeffs,
                               Convention convention = Convention::monomial);

  int n() const { return n_; }
  Rational degree() const { return degree_; }
  int q() const { return q_; }
  int degree_times_q() const { return dq_; }
  Convention convention() const { return convention_; }
  const TermMap &terms() const { return terms_; }

  double coeff(const MultiIndex &alpha) const;

  /// True when terms are signed monomials x^alpha (q = 1, even integer d).
  bool signed_monomials() const;
  /// Signed monomials with only even exponents: invariant under every
  /// coordinate reflection, so moments with an odd exponent vanish.
  bool reflection_symmetric() const;

  std::vector<MultiIndex> basis() const;
  std::vector<double> dense() const;

  friend bool operator==(const Polynomial &, const Polynomial &) = default;

private:
  int n_;
  Rational degree_;
  int q_;
  int dq_;
  Convention convention_;
  TermMap terms_;
};

/// Value of the basis function attached to alpha at x (0^0 = 1).
double monomial_value(const MultiIndex &alpha, int q, bool signed_mode,
                      std::span<const double> x);

double evaluate(const Polynomial &g, std::span<const double> x);

/// Multiplies every coefficient by lambda > 0.
Polynomial rescale(const Polynomial &g, double lambda);

/// Exact change of coefficient convention (q = 1 only for multinomial).
Polynomial to_convention(const Polynomial &g, Convention target);

/// a*g + b*h over the same space and convention.
Polynomial combine(double a, const Polynomial &g, double b, const Polynomial &h);

/// sum_i |x_i|^d, i.e. x_i^d for even integer d.
Polynomial ld_polynomial(int n, Rational d, int q = 1);

/// Symmetric Gram matrix over the degree-d/2 monomial basis:
/// g_Q(x) = v(x)^T Q v(x), v ordered by enumerate_indices(n, d/2).
class GramForm {
public:
  GramForm(int n, int d, Matrix q);

  int n() const { return n_; }
  int d() const { return d_; }
  const Matrix &Q() const { return q_; }
  std::vector<MultiIndex> basis() const { return enumerate_indices(n_, d_ / 2, 1); }

  friend bool operator==(const GramForm &, const GramForm &) = default;

private:
  int n_;
  int d_;
  Matrix q_;
};

/// Monomial-convention polynomial with x^gamma coefficient
/// sum over ordered pairs alpha + beta = gamma of Q(alpha, beta).
Polynomial expand_gram(const GramForm &form);

/// Gram matrix of sum_i x_i^d with ones on the pure powers x_i^(d/2).
GramForm ld_gram(int n, int d);

struct NormReport {
  std::size_t l0 = 0;
  double l1 = 0.0;
  std::optional<double> l2_weighted_sq;
  std::optional<double> trace;
};

/// l0 and l1 over monomial-convention coefficients; weighted l2 over
/// multinomial-convention coefficients when q = 1.
NormReport norms(const Polynomial &g);
NormReport norms(const GramForm &form);

/// sum c_alpha p_alpha^2 with p the multinomial-convention coefficients.
/// Throws std::invalid_argument for q != 1.
double weighted_l2_sq(const Polynomial &g);

} // namespace homvol
