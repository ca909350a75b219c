#pragma once

namespace duflo {

inline constexpr const char* kToolName = "duflo";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace duflo
