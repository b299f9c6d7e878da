#pragma once

namespace projcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace projcap
