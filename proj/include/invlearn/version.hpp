#pragma once

namespace invlearn {

inline constexpr const char* kVersion = "0.1.0";

}
