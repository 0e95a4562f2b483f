#pragma once

// Plain-text layer-stack files.
//
//   # comment
//   incident 1.0
//   substrate 1.5
//   scale 1.04                 (optional, coating design files)
//   thinning_exponent 1.0      (optional, coating design files)
//   dispersion TiO2            (optional named table, lines of
//     700 2.35 0               wavelength_nm  n_real  n_imag)
//     800 2.30 0
//   end
//   2.3 0 81.52                one layer: n_real n_imag thickness_nm
//   @TiO2 81.52                layer using a named dispersion table
//
// Layers are listed from the incident side towards the substrate.

#include <iosfwd>
#include <optional>
#include <string>

#include "hemicav/tmm.hpp"

namespace hcav::io {

struct StackFile {
    tmm::LayerStack stack;
    std::optional<double> scale;
    std::optional<double> thinning_exponent;
};

StackFile parse_stack(std::istream& in);
StackFile read_stack_file(const std::string& path);

void write_stack(std::ostream& out, const StackFile& file);
void write_stack_file(const std::string& path, const StackFile& file);

}  // namespace hcav::io
