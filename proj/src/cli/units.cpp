#include "hemicav/cli/units.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "hemicav/constants.hpp"

namespace hcav::cli {

const char* internal_unit(Dimension d) {
    switch (d) {
        case Dimension::Length: return "um";
        case Dimension::Frequency: return "THz";
        case Dimension::Energy: return "ueV";
        case Dimension::Angle: return "rad";
        case Dimension::DipoleMoment: return "D";
        case Dimension::Volume: return "um^3";
        case Dimension::SpatialFrequency: return "mm^-1";
        case Dimension::Time: return "fs";
    }
    return "";
}

const char* to_string(Dimension d) {
    switch (d) {
        case Dimension::Length: return "length";
        case Dimension::Frequency: return "frequency";
        case Dimension::Energy: return "energy";
        case Dimension::Angle: return "angle";
        case Dimension::DipoleMoment: return "dipole moment";
        case Dimension::Volume: return "volume";
        case Dimension::SpatialFrequency: return "spatial frequency";
        case Dimension::Time: return "time";
    }
    return "";
}

namespace {

const std::map<std::string, double>& units_for(Dimension d) {
    static const std::map<Dimension, std::map<std::string, double>> table = {
        {Dimension::Length, {{"pm", 1e-6}, {"nm", 1e-3}, {"um", 1.0}, {"µm", 1.0}, {"μm", 1.0}, {"mm", 1e3}, {"m", 1e6}}},
        {Dimension::Frequency, {{"Hz", 1e-12}, {"MHz", 1e-6}, {"GHz", 1e-3}, {"THz", 1.0}, {"PHz", 1e3}}},
        {Dimension::Energy, {{"neV", 1e-3}, {"ueV", 1.0}, {"µeV", 1.0}, {"μeV", 1.0}, {"meV", 1e3}, {"eV", 1e6}}},
        {Dimension::Angle, {{"rad", 1.0}, {"mrad", 1e-3}, {"deg", constants::pi / 180.0}, {"°", constants::pi / 180.0}}},
        {Dimension::DipoleMoment, {{"D", 1.0}, {"Debye", 1.0}, {"C*m", 1.0 / constants::debye}, {"Cm", 1.0 / constants::debye}}},
        {Dimension::Volume, {{"um3", 1.0}, {"um^3", 1.0}, {"µm³", 1.0}, {"μm³", 1.0}, {"nm3", 1e-9}, {"nm^3", 1e-9}}},
        {Dimension::SpatialFrequency,
         {{"mm^-1", 1.0}, {"1/mm", 1.0}, {"um^-1", 1e3}, {"1/um", 1e3}, {"m^-1", 1e-3}, {"1/m", 1e-3}}},
        {Dimension::Time, {{"as", 1e-3}, {"fs", 1.0}, {"ps", 1e3}, {"ns", 1e6}}},
    };
    return table.at(d);
}

}  // namespace

std::optional<double> parse_quantity(const std::string& text, Dimension d, std::string* error) {
    auto fail = [&](const std::string& msg) -> std::optional<double> {
        if (error) *error = msg;
        return std::nullopt;
    };
    std::size_t pos = text.find_first_not_of(" \t");
    if (pos == std::string::npos) return fail("empty quantity");
    const std::string body = text.substr(pos);
    double value = 0.0;
    std::size_t used = 0;
    if (body.rfind("inf", 0) == 0 || body.rfind("+inf", 0) == 0) {
        value = std::numeric_limits<double>::infinity();
        used = body.find_first_of(" \t");
        if (used == std::string::npos) used = body.size();
        const std::string word = body.substr(0, used);
        if (word != "inf" && word != "+inf" && word != "infinity") return fail("bad magnitude '" + word + "'");
    } else {
        try {
            value = std::stod(body, &used);
        } catch (const std::exception&) {
            return fail("'" + text + "' does not start with a number");
        }
    }
    std::string unit = body.substr(used);
    unit.erase(0, unit.find_first_not_of(" \t"));
    unit.erase(unit.find_last_not_of(" \t") + 1);
    if (unit.empty()) {
        if (std::isinf(value)) return value;
        return fail(std::string("missing unit (expected a ") + to_string(d) + ", e.g. '1 " + internal_unit(d) + "')");
    }
    const auto& units = units_for(d);
    const auto it = units.find(unit);
    if (it == units.end()) {
        std::string known;
        for (const auto& [name, factor] : units) known += (known.empty() ? "" : ", ") + name;
        return fail("unit '" + unit + "' is not a " + to_string(d) + " (known: " + known + ")");
    }
    return value * it->second;
}

}  // namespace hcav::cli
