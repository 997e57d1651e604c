#pragma once

#include <string>

#include <json.hpp>

namespace chiplet {

// Sorted keys, no whitespace, floats with 9 significant digits, non-finite
// numbers as null. Integers print exactly.
std::string canonical_dump(const nlohmann::json& j);
// Same, with two-space indentation, for files meant to be read.
std::string canonical_pretty(const nlohmann::json& j);

// 64-bit FNV-1a of the canonical form, as 16 hex digits.
std::string content_hash(const nlohmann::json& j);

}  // namespace chiplet
