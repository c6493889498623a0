#pragma once

#include <string>

namespace sparsemine {

/// printf %.17g: enough digits for an exact double round trip.
std::string format_double(double v);

}  // namespace sparsemine
