#pragma once

namespace rmnl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rmnl
