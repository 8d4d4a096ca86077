#pragma once

namespace flowref {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace flowref
