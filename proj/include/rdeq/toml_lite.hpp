#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace rdeq {

/// Parses the TOML subset used by scenario files into a JSON object tree:
/// comments, [table] / [table.sub] headers, and `key = value` pairs where a
/// value is a string, boolean, integer, float, or a (possibly nested,
/// possibly multi-line) array. Throws ParseError with the offending line.
nlohmann::ordered_json parse_toml_lite(const std::string& text);

nlohmann::ordered_json parse_toml_file(const std::filesystem::path& path);

}  // namespace rdeq
