#pragma once

namespace bsym {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bsym
