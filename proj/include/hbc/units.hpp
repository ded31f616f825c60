#pragma once

#include <string>
#include <string_view>

namespace hbc::units {

enum class Dimension { dimensionless, ohm, farad, hertz, second, volt, decibel };

/// Parses a quantity literal such as "13pF", "10MΩ", "10Mohm", "1.5 pF", "163us"
/// or "12" into its SI value. The unit suffix is mandatory for every dimension
/// except `dimensionless`; an SI prefix (f p n u µ m k M G) is optional.
/// Throws hbc::DomainError with a short reason on malformed input.
double parse_quantity(std::string_view text, Dimension dim);

/// Formats an SI value with an engineering prefix, e.g. 1.5e-12 F -> "1.5pF".
std::string format_quantity(double value, Dimension dim);

std::string_view symbol(Dimension dim);

}  // namespace hbc::units
