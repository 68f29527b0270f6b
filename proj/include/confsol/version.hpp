#pragma once

namespace confsol {

inline constexpr const char* version = "0.1.0";

}  // namespace confsol
