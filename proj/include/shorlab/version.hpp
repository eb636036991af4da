#pragma once

namespace shorlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace shorlab
