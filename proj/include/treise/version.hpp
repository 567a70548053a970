#pragma once

namespace treise {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace treise
