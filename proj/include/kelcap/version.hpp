#pragma once

namespace kelcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kelcap
