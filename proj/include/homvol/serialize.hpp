#pragma once

#include "homvol/polynomial.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace homvol {

using Json = nlohmann::ordered_json;

// Polynomial document:
//   {"n": int, "d": [num, den], "q": int, "convention": "monomial"|"multinomial",
//    "terms": [{"alpha_times_q": [int, ...], "coeff": float}, ...]}
// Gram document:
//   {"n": int, "d": int, "Q": [[float, ...], ...]}
// Serialization writes fields in exactly this order with terms in canonical
// order; parse errors are ParseError naming the offending field.

Json to_json(const Polynomial &g);
Json to_json(const GramForm &form);

Polynomial polynomial_from_json(const Json &doc);
GramForm gram_from_json(const Json &doc);

std::string serialize(const Polynomial &g);
std::string serialize(const GramForm &form);

Polynomial parse_polynomial(std::string_view text);
GramForm parse_gram(std::string_view text);

/// Parses text into a JSON value, reporting syntax errors as ParseError.
Json parse_document(std::string_view text);

/// True when the document looks like a Gram form (has a "Q" field).
bool is_gram_document(const Json &doc);

} // namespace homvol
