#pragma once

namespace rk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rk
