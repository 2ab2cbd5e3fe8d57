#pragma once

namespace coolwalk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coolwalk
