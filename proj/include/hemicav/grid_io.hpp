#pragma once

// Binary and CSV grids shared by surface maps and FDTD dumps.
//
// Binary layout, little-endian: the 8 bytes "HCAVGRD1", uint32 nx,
// uint32 ny, float64 pitch_um, int32 component id, then nx * ny float64
// values row-major in y.

#include <cstdint>
#include <filesystem>
#include <vector>

namespace hcav::io {

enum class GridComponent : std::int32_t {
    Height = 0,
    EnergyDensity = 1,
    Er = 2,
    Ephi = 3,
    Ez = 4,
    Hr = 5,
    Hphi = 6,
    Hz = 7,
};

struct Grid {
    std::uint32_t nx = 0;
    std::uint32_t ny = 0;
    double pitch_um = 1.0;
    GridComponent component = GridComponent::Height;
    std::vector<double> values;
};

void write_grid(const std::filesystem::path& path, const Grid& grid);
Grid read_grid(const std::filesystem::path& path);

/// One row per y, comma-separated; a leading "# pitch_um=<v>" comment is
/// written and honored. Empty cells or "nan" read back as NaN.
void write_grid_csv(const std::filesystem::path& path, const Grid& grid);
Grid read_grid_csv(const std::filesystem::path& path, double default_pitch_um = 1.0);

}  // namespace hcav::io
