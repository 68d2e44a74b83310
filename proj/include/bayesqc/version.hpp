#pragma once

namespace bayesqc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bayesqc
