#include "homvol/polynomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace homvol {

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0)
    throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

Rational Rational::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ')
      s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
      s.remove_suffix(1);
    return s;
  };
  auto to_int = [&](std::string_view s) {
    s = trim(s);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos)
    return make(to_int(text), 1);
  return make(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num)
                  : std::to_string(num) + "/" + std::to_string(den);
}

bool CanonicalOrder::operator()(const MultiIndex &a, const MultiIndex &b) const {
  const int ta = total(a);
  const int tb = total(b);
  if (ta != tb)
    return ta < tb;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

int total(const MultiIndex &alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

bool has_odd_entry(const MultiIndex &alpha) {
  return std::any_of(alpha.begin(), alpha.end(), [](int a) { return a % 2 != 0; });
}

namespace {

void enumerate_into(int n, int remaining, MultiIndex &prefix,
                    std::vector<MultiIndex> &out) {
  if (static_cast<int>(prefix.size()) == n - 1) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    prefix.push_back(k);
    enumerate_into(n, remaining - k, prefix, out);
    prefix.pop_back();
  }
}

} // namespace

std::vector<MultiIndex> enumerate_indices(int n, int d_times_q, int q) {
  if (n < 1 || d_times_q < 0 || q < 1)
    throw std::invalid_argument("enumerate_indices: need n >= 1, dq >= 0, q >= 1");
  std::vector<MultiIndex> out;
  MultiIndex prefix;
  prefix.reserve(static_cast<std::size_t>(n));
  enumerate_into(n, d_times_q, prefix, out);
  return out;
}

std::uint64_t multinomial_coefficient(const MultiIndex &alpha, int q) {
  if (q != 1)
    throw std::invalid_argument("multinomial coefficient requires integer exponents (q = 1)");
  // product of binomials C(a_1 + ... + a_k, a_k)
  unsigned __int128 result = 1;
  int running = 0;
  for (int a : alpha) {
    if (a < 0)
      throw std::invalid_argument("negative exponent");
    for (int j = 1; j <= a; ++j) {
      ++running;
      result = result * static_cast<unsigned>(running) / static_cast<unsigned>(j);
    }
  }
  if (result > std::numeric_limits<std::uint64_t>::max())
    throw std::overflow_error("multinomial coefficient overflows 64 bits");
  return static_cast<std::uint64_t>(result);
}

std::string to_string(Convention c) {
  return c == Convention::monomial ? "monomial" : "multinomial";
}

Convention convention_from_string(std::string_view s) {
  if (s == "monomial")
    return Convention::monomial;
  if (s == "multinomial")
    return Convention::multinomial;
  throw std::invalid_argument("unknown convention '" + std::string(s) + "'");
}

Polynomial::Polynomial(int n, Rational degree, int q, std::vector<Term> terms,
                       Convention convention)
    : n_(n), degree_(Rational::make(degree.num, degree.den)), q_(q), dq_(0),
      convention_(convention) {
  if (n < 1)
    throw std::invalid_argument("dimension n must be >= 1");
  if (q < 1)
    throw std::invalid_argument("lattice denominator q must be >= 1");
  if (degree_.num <= 0)
    throw std::invalid_argument("degree must be positive");
  if ((degree_.num * q) % degree_.den != 0)
    throw std::invalid_argument("degree " + degree_.str() +
                                " is not on the lattice with denominator " +
                                std::to_string(q));
  dq_ = static_cast<int>(degree_.num * q / degree_.den);
  if (convention == Convention::multinomial && q != 1)
    throw std::invalid_argument("multinomial convention requires q = 1");

  for (auto &t : terms) {
    if (static_cast<int>(t.alpha.size()) != n)
      throw std::invalid_argument("exponent vector length differs from n");
    if (std::any_of(t.alpha.begin(), t.alpha.end(), [](int a) { return a < 0; }))
      throw std::invalid_argument("negative exponent");
    if (total(t.alpha) != dq_)
      throw std::invalid_argument("degree mismatch: exponents sum to " +
                                  Rational::make(total(t.alpha), q).str() +
                                  ", expected " + degree_.str());
    if (!std::isfinite(t.coeff))
      throw std::invalid_argument("non-finite coefficient");
    auto [it, inserted] = terms_.emplace(std::move(t.alpha), t.coeff);
    if (!inserted)
      throw std::invalid_argument("duplicate exponent vector");
  }
}

Polynomial Polynomial::from_dense(int n, Rational degree, int q,
                                  std::span<const double> coeffs,
                                  Convention convention) {
  const Rational d = Rational::make(degree.num, degree.den);
  if ((d.num * q) % d.den != 0)
    throw std::invalid_argument("degree not on lattice");
  const auto basis = enumerate_indices(n, static_cast<int>(d.num * q / d.den), q);
  if (basis.size() != coeffs.size())
    throw std::invalid_argument("dense coefficient vector has wrong length");
  std::vector<Term> terms;
  terms.reserve(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (coeffs[k] != 0.0)
      terms.push_back({basis[k], coeffs[k]});
  return Polynomial(n, d, q, std::move(terms), convention);
}

double Polynomial::coeff(const MultiIndex &alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

bool Polynomial::signed_monomials() const {
  return q_ == 1 && degree_.is_even_integer();
}

bool Polynomial::reflection_symmetric() const {
  if (!signed_monomials())
    return false;
  return std::none_of(terms_.begin(), terms_.end(), [](const auto &t) {
    return t.second != 0.0 && has_odd_entry(t.first);
  });
}

std::vector<MultiIndex> Polynomial::basis() const {
  return enumerate_indices(n_, dq_, q_);
}

std::vector<double> Polynomial::dense() const {
  const auto b = basis();
  std::vector<double> out(b.size(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k)
    out[k] = coeff(b[k]);
  return out;
}

double monomial_value(const MultiIndex &alpha, int q, bool signed_mode,
                      std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const int a = alpha[i];
    if (a == 0)
      continue;
    if (signed_mode) {
      double p = 1.0;
      for (int k = 0; k < a; ++k)
        p *= x[i];
      v *= p;
    } else if (a % q == 0) {
      const double ax = std::abs(x[i]);
      double p = 1.0;
      for (int k = 0; k < a / q; ++k)
        p *= ax;
      v *= p;
    } else {
      v *= std::pow(std::abs(x[i]), static_cast<double>(a) / q);
    }
  }
  return v;
}

double evaluate(const Polynomial &g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.n())
    throw std::invalid_argument("evaluate: point dimension differs from n");
  const bool signed_mode = g.signed_monomials();
  const bool multinomial = g.convention() == Convention::multinomial;
  double s = 0.0;
  for (const auto &[alpha, c] : g.terms()) {
    double w = c;
    if (multinomial)
      w *= static_cast<double>(multinomial_coefficient(alpha));
    s += w * monomial_value(alpha, g.q(), signed_mode, x);
  }
  return s;
}

namespace {

std::vector<Term> term_list(const Polynomial &g) {
  std::vector<Term> out;
  out.reserve(g.terms().size());
  for (const auto &[a, c] : g.terms())
    out.push_back({a, c});
  return out;
}

} // namespace

Polynomial rescale(const Polynomial &g, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("rescale: lambda must be positive and finite");
  auto terms = term_list(g);
  for (auto &t : terms)
    t.coeff *= lambda;
  return Polynomial(g.n(), g.degree(), g.q(), std::move(terms), g.convention());
}

Polynomial to_convention(const Polynomial &g, Convention target) {
  if (g.convention() == target)
    return g;
  if (g.q() != 1)
    throw std::invalid_argument("multinomial convention requires q = 1");
  auto terms = term_list(g);
  for (auto &t : terms) {
    const double c = static_cast<double>(multinomial_coefficient(t.alpha));
    t.coeff = target == Convention::multinomial ? t.coeff / c : t.coeff * c;
  }
  return Polynomial(g.n(), g.degree(), g.q(), std::move(terms), target);
}

Polynomial combine(double a, const Polynomial &g, double b, const Polynomial &h) {
  if (g.n() != h.n() || !(g.degree() == h.degree()) || g.q() != h.q() ||
      g.convention() != h.convention())
    throw std::invalid_argument("combine: polynomials live in different spaces");
  Polynomial::TermMap acc;
  for (const auto &[alpha, c] : g.terms())
    acc[alpha] += a * c;
  for (const auto &[alpha, c] : h.terms())
    acc[alpha] += b * c;
  std::vector<Term> terms;
  for (auto &[alpha, c] : acc)
    terms.push_back({alpha, c});
  return Polynomial(g.n(), g.degree(), g.q(), std::move(terms), g.convention());
}

Polynomial ld_polynomial(int n, Rational d, int q) {
  const Rational dd = Rational::make(d.num, d.den);
  if ((dd.num * q) % dd.den != 0)
    throw std::invalid_argument("degree not on lattice");
  const int dq = static_cast<int>(dd.num * q / dd.den);
  std::vector<Term> terms;
  for (int i = 0; i < n; ++i) {
    MultiIndex alpha(static_cast<std::size_t>(n), 0);
    alpha[static_cast<std::size_t>(i)] = dq;
    terms.push_back({alpha, 1.0});
  }
  return Polynomial(n, dd, q, std::move(terms));
}

GramForm::GramForm(int n, int d, Matrix q) : n_(n), d_(d), q_(std::move(q)) {
  if (n < 1)
    throw std::invalid_argument("dimension n must be >= 1");
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("Gram form degree must be an even integer >= 2");
  const auto size = enumerate_indices(n, d / 2, 1).size();
  if (q_.rows() != size || q_.cols() != size)
    throw std::invalid_argument("Gram matrix size must be " + std::to_string(size));
  for (double v : q_.data())
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite Gram matrix entry");
  if (!q_.is_symmetric(1e-12))
    throw std::invalid_argument("Gram matrix is not symmetric");
}

Polynomial expand_gram(const GramForm &form) {
  const auto basis = form.basis();
  Polynomial::TermMap acc;
  for (const auto &gamma : enumerate_indices(form.n(), form.d(), 1))
    acc[gamma] = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      MultiIndex gamma(basis[i]);
      for (std::size_t k = 0; k < gamma.size(); ++k)
        gamma[k] += basis[j][k];
      acc[gamma] += form.Q()(i, j);
    }
  std::vector<Term> terms;
  for (auto &[gamma, c] : acc)
    if (c != 0.0)
      terms.push_back({gamma, c});
  return Polynomial(form.n(), Rational::make(form.d()), 1, std::move(terms));
}

GramForm ld_gram(int n, int d) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("ld_gram: d must be even and >= 2");
  const auto basis = enumerate_indices(n, d / 2, 1);
  Matrix q(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (std::count(basis[k].begin(), basis[k].end(), 0) == n - 1)
      q(k, k) = 1.0;
  return GramForm(n, d, std::move(q));
}

NormReport norms(const Polynomial &g) {
  NormReport r;
  const Polynomial mono = to_convention(g, Convention::monomial);
  for (const auto &[alpha, c] : mono.terms()) {
    if (c != 0.0)
      ++r.l0;
    r.l1 += std::abs(c);
  }
  if (g.q() == 1)
    r.l2_weighted_sq = weighted_l2_sq(g);
  return r;
}

NormReport norms(const GramForm &form) {
  NormReport r = norms(expand_gram(form));
  r.trace = form.Q().trace();
  return r;
}

double weighted_l2_sq(const Polynomial &g) {
  if (g.q() != 1)
    throw std::invalid_argument("weighted l2 norm is only defined for q = 1");
  const Polynomial p = to_convention(g, Convention::multinomial);
  double s = 0.0;
  for (const auto &[alpha, c] : p.terms())
    s += static_cast<double>(multinomial_coefficient(alpha)) * c * c;
  return s;
}

} // namespace homvol
