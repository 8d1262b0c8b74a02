#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "brs/discrepancy.hpp"
#include "brs/equidecomp.hpp"
#include "brs/invariants.hpp"
#include "brs/linmaps.hpp"
#include "brs/sets.hpp"

namespace brs {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "brs/1";

// Rationals are "p/q" strings, scalars use the text form of format_scalar,
// module vectors are {"r": "p/q", "m": ["p/q", ...]}.
Json to_json(const Rational& q);
Json to_json(const ScalarModule& s);
Json to_json(const ModuleVector& v);
Rational rational_from_json(const Json& j);  // also accepts JSON integers
ScalarModule scalar_from_json(const Json& j, int d);
ModuleVector vector_from_json(const Json& j);

// Shape plus certificate, without the envelope.
Json shape_to_json(const SetDescription& s);
SetDescription shape_from_json(const Json& j);

// {"schema": "brs/1", "alpha": descriptor, "set": ...}
Json set_document(const SetDescription& s, const AlphaContext& ctx);
// Accepts a full document or a bare shape. The alpha context comes from the
// document when present; `fallback` is used otherwise.
struct SetDocument {
  SetDescription set;
  AlphaContext ctx;
};
SetDocument parse_set_document(const Json& j, const AlphaContext& fallback);

Json to_json(const Certificate& c);
Json to_json(const DiscrepancyReport& r);
Json to_json(const HadwigerReport& r);
Json to_json(const Verdict& v);
Json to_json(const std::vector<DecompositionPiece>& pieces);
std::vector<DecompositionPiece> pieces_from_json(const Json& j);
Json to_json(const ModuleMap& m);

// {"U": [[...], ...]} with integer or string entries, or a bare matrix.
Matrix<Integer> u_matrix_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// "start_index,checkpoint,max_abs" rows.
std::string discrepancy_csv(const DiscrepancyReport& r);

}  // namespace brs
