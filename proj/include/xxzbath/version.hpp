#pragma once
// Library version string, embedded in output manifests.

namespace xxzbath {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace xxzbath
