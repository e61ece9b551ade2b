#pragma once

namespace rdsig {

inline constexpr const char* kVersion = "0.1.0";

}
