#pragma once

namespace bivmap {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace bivmap
