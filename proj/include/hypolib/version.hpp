#pragma once

namespace hypolib {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace hypolib
