#pragma once

namespace affvqa {

inline constexpr const char* kToolName = "affvqa";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace affvqa
