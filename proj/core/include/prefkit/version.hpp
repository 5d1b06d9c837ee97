#pragma once

namespace prefkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace prefkit
