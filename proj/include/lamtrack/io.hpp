#pragma once

#include <string>

#include <json.hpp>

namespace lamtrack {

// Sorted keys, two-space indent, reals with 12 significant digits, non-finite reals as null.
std::string canonical_dump(const nlohmann::json& j);
std::string format_real(double x, int digits = 12);

// "-" reads stdin. Throws ParseError naming the file, line and column.
nlohmann::json read_json_file(const std::string& path);
nlohmann::json parse_json(const std::string& text, const std::string& name);

}  // namespace lamtrack
