#pragma once

namespace riskroute {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace riskroute
