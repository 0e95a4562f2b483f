#pragma once

// Quantities in config files are strings such as "750 nm" or "15 ueV".
// Each dimension converts to one internal unit.

#include <optional>
#include <string>

namespace hcav::cli {

enum class Dimension {
    Length,            // um
    Frequency,         // THz
    Energy,            // ueV
    Angle,             // rad
    DipoleMoment,      // Debye
    Volume,            // um^3
    SpatialFrequency,  // 1/mm
    Time,              // fs
};

const char* internal_unit(Dimension d);
const char* to_string(Dimension d);

/// Parses "<number> <unit>" into the internal unit of `d`. "inf" is
/// accepted as a magnitude. Returns the error text on failure.
std::optional<double> parse_quantity(const std::string& text, Dimension d, std::string* error);

}  // namespace hcav::cli
