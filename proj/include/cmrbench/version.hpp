#pragma once

namespace cmrbench {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace cmrbench
