#pragma once

namespace cskit {

inline constexpr const char* kToolName = "cskit";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace cskit
