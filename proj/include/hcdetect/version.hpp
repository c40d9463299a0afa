#pragma once

namespace hcdetect {

inline constexpr const char* kToolName = "hcdetect";
inline constexpr const char* kToolVersion = "0.1.0";
/// Bumped whenever a JSON artifact changes shape.
inline constexpr const char* kSchemaVersion = "1.0.0";

}  // namespace hcdetect
