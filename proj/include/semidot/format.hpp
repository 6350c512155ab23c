#pragma once

#include <string>

namespace semidot {

/// "%.17g" rendering; round-trips every double and is stable across runs.
std::string format_double(double v);

} // namespace semidot
