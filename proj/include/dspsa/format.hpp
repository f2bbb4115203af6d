#pragma once

#include <string>

namespace dspsa {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_number(double value);

} // namespace dspsa
