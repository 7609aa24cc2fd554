#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

namespace im2colsim::detail {

/// Reads a whole file; Error(Parse) if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Parses JSON, reporting syntax errors as "<origin>:<line>: ...".
nlohmann::json parse_json(const std::string& text, const std::string& origin);

}  // namespace im2colsim::detail
