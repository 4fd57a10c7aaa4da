#pragma once

// JSON encodings of the catalog objects.  Every top-level document carries
// "schema_version"; rationals are strings "p/q", complex doubles [re, im].

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "orbi/cocycle.hpp"
#include "orbi/convolution.hpp"
#include "orbi/morita.hpp"
#include "orbi/spectral.hpp"

namespace orbi::io {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

/// Throws Error("<origin>:<line>:<column>: <message>") on malformed text.
json parse(const std::string& text, const std::string& origin = "<input>");
json read_file(const std::string& path);
/// Throws Error naming `where` when the version field is missing or unsupported.
void check_version(const json& doc, const std::string& where);

std::string to_string(const Rational& r);
Rational parse_rational(const json& j, const std::string& path);

json to_json(const GaussRat& z);
json to_json(const ExactMatrix& m);
json to_json(const FiniteGroupoid& g);
json to_json(const ActionGroupoid& g);
json to_json(const Bitorsor& h);
json to_json(const Cocycle& c);
json to_json(const ModeFunction& f);
json to_json(const Generator& f);
json to_json(const ValidationReport& r);
json to_json(const SpectralTripleReport& r);
json to_json(const FiniteGroupoid& g, const ArrowFunction& f);

// Decoders report the offending field as a JSON path, e.g. "groupoid.arrows[3].source".
GaussRat gauss_from_json(const json& j, const std::string& path = "value");
ExactMatrix matrix_from_json(const json& j, const std::string& path = "matrix");
FiniteGroupoid finite_groupoid_from_json(const json& j, const std::string& path = "groupoid");
ActionGroupoid action_groupoid_from_json(const json& j, const std::string& path = "groupoid");
Bitorsor bitorsor_from_json(const json& j, const std::string& path = "bitorsor");
Cocycle cocycle_from_json(const json& j, const std::string& path = "cocycle");
ModeFunction mode_function_from_json(const json& j, const std::string& path = "function");
Generator generator_from_json(const json& j, const std::string& path = "generator");
ValidationReport validation_from_json(const json& j, const std::string& path = "report");
SpectralTripleReport triple_report_from_json(const json& j, const std::string& path = "report");
ArrowFunction arrow_function_from_json(const json& j, const std::string& path = "function");

/// Groupoid description file: {"schema_version", "groupoid", "covers"?, "arcs"?}.
struct GroupoidFile {
  std::variant<FiniteGroupoid, ActionGroupoid> groupoid;
  std::vector<CechCover> covers;
  std::vector<ArcCover> arcs;
};

json to_json(const GroupoidFile& f);
GroupoidFile groupoid_file_from_json(const json& j, const std::string& path = "document");
GroupoidFile read_groupoid_file(const std::string& path);

}  // namespace orbi::io
