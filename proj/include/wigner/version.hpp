#pragma once

#define WIGNER_VERSION "0.1.0"

namespace wigner {
inline constexpr const char* version = WIGNER_VERSION;
}
