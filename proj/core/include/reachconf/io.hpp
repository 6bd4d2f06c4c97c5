#pragma once

#include "reachconf/conform.hpp"
#include "reachconf/setops.hpp"

#include <optional>
#include <string>

namespace reachconf::io {

// JSON text in and out. Matrices are arrays of rows; doubles are written
// with full round-trip precision.

std::string zonotope_to_json(const Zonotope& z);
Zonotope zonotope_from_json(const std::string& text);

/// {"cases": [{"x0": [...], "u": [[...]], "samples": [[[...]]]}]}; "x0" is
/// omitted for input-output models.
std::string suite_to_json(const TestSuite& suite);
TestSuite suite_from_json(const std::string& text);

std::string spec_to_json(const UncertaintySpec& spec);
UncertaintySpec spec_from_json(const std::string& text);

/// An identified model: catalog dynamics (optionally with re-estimated
/// parameters) or a black-box s-expression, plus the identified sets.
struct IdentifiedModel {
    std::string system;
    std::string method;
    std::optional<Vec> p;
    std::string narx; ///< s-expression, black-box models only
    ConformanceResult result;
};

std::string model_to_json(const IdentifiedModel& m);
/// Throws std::invalid_argument on malformed documents.
IdentifiedModel model_from_json(const std::string& text);

/// Dynamics of an identified model.
Model instantiate(const IdentifiedModel& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

} // namespace reachconf::io
