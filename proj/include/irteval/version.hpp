#pragma once

namespace irteval {

inline constexpr const char* kToolVersion = "irteval 0.1.0";

}  // namespace irteval
