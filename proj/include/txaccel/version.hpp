#pragma once

namespace txaccel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace txaccel
