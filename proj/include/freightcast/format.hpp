#pragma once

#include <string>

namespace freightcast {

/// Shortest decimal representation that parses back to exactly the same
/// double (std::to_chars). Locale-independent, so an emitted artifact is
/// byte-stable across runs and platforms.
std::string format_double(double v);

}  // namespace freightcast
