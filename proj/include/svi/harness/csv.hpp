#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace svi::harness {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace svi::harness
