#pragma once

// Discretized body-of-revolution geometry: a planar DBR at the bottom, a
// vacuum gap, and a curved (or flat) perfect conductor on top, inside a
// closed conducting cylinder.
//
// Lengths are in micrometres. Cell (i, k) spans r in [i, i+1) * cell and
// z in [k, k+1) * cell; z = 0 is the bottom wall under the substrate.

#include <cstdint>
#include <optional>
#include <vector>

#include "hemicav/coating.hpp"
#include "hemicav/modes.hpp"
#include "hemicav/tmm.hpp"

namespace hcav::fdtd {

struct DomainOptions {
    double design_wavelength_nm = 750.0;  // shortest wavelength of interest
    double resolution = 20.0;             // cells per wavelength in the densest medium
    int azimuthal_order = 1;
    double radial_extent_um = 10.0;       // inner radius of the conducting side wall
    double substrate_thickness_um = 0.25; // dielectric under the DBR, ignored without one
    double fill_permittivity = 1.0;       // relative permittivity of the cavity gap
};

inline constexpr double minimum_resolution = 15.0;

struct SimulationDomain {
    double cell_um = 0.0;
    int nr = 0;  // cells along r, including the wall column
    int nz = 0;  // cells along z, including the top wall row
    int azimuthal_order = 1;
    std::vector<double> permittivity;  // nz * nr, row-major in z
    std::vector<std::uint8_t> pec;     // nz * nr

    double design_wavelength_nm = 0.0;
    double resolution = 0.0;
    double max_index = 1.0;
    int surface_row = 0;            // first cell row above the DBR
    int mirror_apex_row = 0;        // first conducting row on axis
    double mirror_radius_um = 0.0;  // infinity for a flat top mirror
    std::vector<int> layer_rows;    // interface rows from the surface downwards

    std::size_t cell_index(int i, int k) const { return static_cast<std::size_t>(k) * nr + i; }
    double eps(int i, int k) const { return permittivity[cell_index(i, k)]; }
    bool is_pec(int i, int k) const { return pec[cell_index(i, k)] != 0; }
    double surface_z_um() const { return surface_row * cell_um; }
    double cavity_length_um() const { return (mirror_apex_row - surface_row) * cell_um; }
    double radial_extent_um() const { return nr * cell_um; }
    double axial_extent_um() const { return nz * cell_um; }
};

/// Rasterizes the cavity. `dbr` layers are listed cavity side first; a
/// null stack gives a bare conducting bottom mirror. With a finite mirror
/// radius the top mirror is a spherical cap of depth `dimple->depth_um`
/// in a flat conducting face. Throws BuildError.
SimulationDomain build_domain(const modes::CavityGeometry& cavity, const std::optional<tmm::LayerStack>& dbr,
                              const std::optional<coating::DimpleGeometry>& dimple, const DomainOptions& options);

}  // namespace hcav::fdtd
