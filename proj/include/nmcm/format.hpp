// format.hpp: Round-trip numeric formatting shared by the CSV writers.
#pragma once

#include <string>

namespace nmcm {

/// 17 significant digits ("%.17g"); negative zero is printed as 0.
std::string format_double(double value);

}  // namespace nmcm
