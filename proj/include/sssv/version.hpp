#pragma once

namespace sssv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sssv
