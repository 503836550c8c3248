#include "homvol/serialize.hpp"

#include "homvol/errors.hpp"

namespace homvol {
namespace {

const Json &require(const Json &doc, const char *field) {
  if (!doc.is_object())
    throw ParseError("", "document must be a JSON object");
  auto it = doc.find(field);
  if (it == doc.end())
    throw ParseError(field, "missing field");
  return *it;
}

int require_int(const Json &doc, const char *field) {
  const Json &v = require(doc, field);
  if (!v.is_number_integer())
    throw ParseError(field, "expected an integer");
  return v.get<int>();
}

} // namespace

Json to_json(const Polynomial &g) {
  Json doc;
  doc["n"] = g.n();
  doc["d"] = Json::array({g.degree().num, g.degree().den});
  doc["q"] = g.q();
  doc["convention"] = to_string(g.convention());
  Json terms = Json::array();
  for (const auto &[alpha, c] : g.terms()) {
    Json t;
    t["alpha_times_q"] = alpha;
    t["coeff"] = c;
    terms.push_back(std::move(t));
  }
  doc["terms"] = std::move(terms);
  return doc;
}

Json to_json(const GramForm &form) {
  Json doc;
  doc["n"] = form.n();
  doc["d"] = form.d();
  Json rows = Json::array();
  for (std::size_t i = 0; i < form.Q().rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < form.Q().cols(); ++j)
      row.push_back(form.Q()(i, j));
    rows.push_back(std::move(row));
  }
  doc["Q"] = std::move(rows);
  return doc;
}

Polynomial polynomial_from_json(const Json &doc) {
  const int n = require_int(doc, "n");
  if (n < 1)
    throw ParseError("n", "dimension must be >= 1");

  const Json &dj = require(doc, "d");
  Rational d;
  if (dj.is_array() && dj.size() == 2 && dj[0].is_number_integer() &&
      dj[1].is_number_integer()) {
    if (dj[1].get<std::int64_t>() <= 0 || dj[0].get<std::int64_t>() <= 0)
      throw ParseError("d", "degree must be a positive fraction [num, den]");
    d = Rational::make(dj[0].get<std::int64_t>(), dj[1].get<std::int64_t>());
  } else {
    throw ParseError("d", "expected [num, den]");
  }

  const int q = require_int(doc, "q");
  if (q < 1)
    throw ParseError("q", "lattice denominator must be >= 1");
  if ((d.num * q) % d.den != 0)
    throw ParseError("d", "degree " + d.str() + " is not on the lattice 1/" +
                              std::to_string(q));
  const int dq = static_cast<int>(d.num * q / d.den);

  Convention convention = Convention::monomial;
  if (auto it = doc.find("convention"); it != doc.end()) {
    if (!it->is_string())
      throw ParseError("convention", "expected a string");
    try {
      convention = convention_from_string(it->get<std::string>());
    } catch (const std::invalid_argument &e) {
      throw ParseError("convention", e.what());
    }
    if (convention == Convention::multinomial && q != 1)
      throw ParseError("convention", "multinomial convention requires q = 1");
  }

  const Json &tj = require(doc, "terms");
  if (!tj.is_array())
    throw ParseError("terms", "expected an array");
  std::vector<Term> terms;
  for (std::size_t k = 0; k < tj.size(); ++k) {
    const std::string base = "terms[" + std::to_string(k) + "]";
    const Json &t = tj[k];
    if (!t.is_object())
      throw ParseError(base, "expected an object");
    auto ait = t.find("alpha_times_q");
    if (ait == t.end() || !ait->is_array())
      throw ParseError(base + ".alpha_times_q", "expected an integer array");
    MultiIndex alpha;
    for (const auto &a : *ait) {
      if (!a.is_number_integer() || a.get<int>() < 0)
        throw ParseError(base + ".alpha_times_q",
                         "exponents must be non-negative integers");
      alpha.push_back(a.get<int>());
    }
    if (static_cast<int>(alpha.size()) != n)
      throw ParseError(base + ".alpha_times_q", "length differs from n");
    if (total(alpha) != dq)
      throw ParseError(base + ".alpha_times_q",
                       "degree mismatch: exponents sum to " +
                           Rational::make(total(alpha), q).str() +
                           " but d = " + d.str());
    auto cit = t.find("coeff");
    if (cit == t.end() || !cit->is_number())
      throw ParseError(base + ".coeff", "expected a number");
    terms.push_back({std::move(alpha), cit->get<double>()});
  }
  try {
    return Polynomial(n, d, q, std::move(terms), convention);
  } catch (const std::invalid_argument &e) {
    throw ParseError("terms", e.what());
  }
}

GramForm gram_from_json(const Json &doc) {
  const int n = require_int(doc, "n");
  if (n < 1)
    throw ParseError("n", "dimension must be >= 1");
  const int d = require_int(doc, "d");
  if (d < 2 || d % 2 != 0)
    throw ParseError("d", "Gram form degree must be an even integer >= 2");
  const Json &qj = require(doc, "Q");
  const std::size_t size = enumerate_indices(n, d / 2, 1).size();
  if (!qj.is_array() || qj.size() != size)
    throw ParseError("Q", "expected a " + std::to_string(size) + "x" +
                              std::to_string(size) + " array");
  Matrix q(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    const Json &row = qj[i];
    if (!row.is_array() || row.size() != size)
      throw ParseError("Q[" + std::to_string(i) + "]", "row has wrong length");
    for (std::size_t j = 0; j < size; ++j) {
      if (!row[j].is_number())
        throw ParseError("Q[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                         "expected a number");
      q(i, j) = row[j].get<double>();
    }
  }
  if (!q.is_symmetric(1e-12))
    throw ParseError("Q", "matrix is not symmetric");
  try {
    return GramForm(n, d, std::move(q));
  } catch (const std::invalid_argument &e) {
    throw ParseError("Q", e.what());
  }
}

std::string serialize(const Polynomial &g) { return to_json(g).dump(); }
std::string serialize(const GramForm &form) { return to_json(form).dump(); }

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error &e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
}

Polynomial parse_polynomial(std::string_view text) {
  return polynomial_from_json(parse_document(text));
}

GramForm parse_gram(std::string_view text) {
  return gram_from_json(parse_document(text));
}

bool is_gram_document(const Json &doc) {
  return doc.is_object() && doc.contains("Q");
}

} // namespace homvol
