#pragma once

namespace bodyshape {
inline constexpr const char* kVersion = "0.1.0";
}
