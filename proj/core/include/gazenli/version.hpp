#pragma once

namespace gazenli {

inline constexpr const char* kToolName = "gazenli";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace gazenli
