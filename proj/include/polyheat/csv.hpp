#pragma once

#include <ostream>
#include <string>

namespace polyheat::csv {

/// Shortest decimal string that reads back to the same double.
std::string number(double v);

}  // namespace polyheat::csv
