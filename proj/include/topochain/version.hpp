#pragma once

#include <string>

namespace topochain {

inline constexpr const char* kVersion = "0.1.0";

inline std::string tool_version_string() { return std::string("topochain ") + kVersion; }

}  // namespace topochain
