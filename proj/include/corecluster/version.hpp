#pragma once

namespace corecluster {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace corecluster
