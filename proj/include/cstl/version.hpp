#pragma once

namespace cstl {
inline constexpr const char* kVersion = "1.0.0";
}
