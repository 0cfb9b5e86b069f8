#pragma once

namespace kinsolve {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kinsolve
