#pragma once

#include <string_view>

namespace popcomp {

inline constexpr std::string_view kToolName = "popcomp";
inline constexpr std::string_view kVersion = "0.1.0";

} // namespace popcomp
