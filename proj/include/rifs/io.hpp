#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rifs/benchmarks.hpp"
#include "rifs/config.hpp"
#include "rifs/measure.hpp"
#include "rifs/spectrum.hpp"
#include "rifs/tangent.hpp"

namespace rifs {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kLeafCsvHeader = "depth,leaf_index,left,right,diameter,mass";

/// Long-format leaf table. The mass column is blank when the matrix carries
/// no masses. Numbers use the shortest round-trip form, so
/// write -> parse -> write is byte-identical.
void write_leaf_csv(std::ostream& out, const ScaleMatrix& matrix);
/// Throws ParseError with a line number on malformed input.
ScaleMatrix parse_leaf_csv(std::istream& in);

/// Config echo in the config-file format, followed by comment lines with
/// run facts; the sidecar is itself a valid config file.
void write_sidecar(std::ostream& out, const Realization& realization);

nlohmann::json to_json(const SpectrumEstimate& estimate);
nlohmann::json to_json(const TangentTestReport& report);
nlohmann::json to_json(const DomainEndpoints& endpoints);

/// `depth,bin,mass` rows.
void write_heatmap_csv(std::ostream& out, const std::vector<std::vector<double>>& heatmap);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

} // namespace rifs
