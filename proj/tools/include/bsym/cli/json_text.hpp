#pragma once

#include <string>

#include <json.hpp>

namespace bsym::cli {

/// Deterministic pretty-printed JSON with floats at 17 significant digits.
/// Object keys keep nlohmann's sorted order; non-finite numbers become null.
std::string json_text(const nlohmann::json& value);

}  // namespace bsym::cli
