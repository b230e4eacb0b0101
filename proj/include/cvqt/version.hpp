#pragma once

namespace cvqt {

inline constexpr const char* kToolVersion = "0.1.0";

/// Version of the config-file schema and of the JSON run-report layout.
inline constexpr int kSchemaVersion = 1;

}  // namespace cvqt
