#pragma once

namespace kwex {

inline constexpr const char* artifact_version = "0.1.0";

}  // namespace kwex
