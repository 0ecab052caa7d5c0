#pragma once

namespace gradednet {

inline constexpr const char* kToolVersion = "0.1.0";

}
