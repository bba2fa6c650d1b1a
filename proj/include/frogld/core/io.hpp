#pragma once

#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

namespace frogld {

// Writes to a temporary sibling and renames over the destination.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// Extended reals in JSON: numbers, or the strings "inf" / "-inf".
nlohmann::json ext_real_to_json(double v);
double ext_real_from_json(const nlohmann::json& j);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string format_double(double v);

}  // namespace frogld
