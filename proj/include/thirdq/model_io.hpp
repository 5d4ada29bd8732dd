// model_io.hpp - JSON model documents

#pragma once

#include <string>

#include <json.hpp>

#include "thirdq/model.hpp"

namespace thirdq::io {

using json = nlohmann::json;

/// Reads and parses a JSON file. Throws Error(InvalidInput) carrying the
/// parser's line/column diagnostic.
json load_json_file(const std::string& path);

/// Converts a model document into a (not yet validated) model. Complex
/// scalars are [re, im] pairs; matrices are row-major nested arrays. An
/// optional per-channel "rate" r >= 0 scales the whole jump operator by
/// sqrt(r) and is folded into l, k and offset.
BosonicModel parse_model(const json& doc);

json model_to_json(const BosonicModel& model);

json complex_to_json(cplx z);
json vector_to_json(const CVector& v);
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what);
CVector vector_from_json(const json& j, Eigen::Index size, const std::string& what);

/// Sets the real scalar addressed by a dotted/indexed path such as
/// "channels[1].rate" or "H[0][1][0]". Throws Error(InvalidInput) when the
/// path does not resolve to an existing number.
void set_parameter(json& doc, const std::string& path, double value);

/// Lowercase hex SHA-256 of the compact serialization of `doc`.
std::string document_hash(const json& doc);

}  // namespace thirdq::io
