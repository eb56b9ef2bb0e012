#pragma once

namespace herdsim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace herdsim
