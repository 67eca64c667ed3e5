#pragma once

namespace conc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace conc
