#include "hemicav/fdtd/domain.hpp"

#include <cmath>
#include <string>

#include "hemicav/error.hpp"

namespace hcav::fdtd {

SimulationDomain build_domain(const modes::CavityGeometry& cavity, const std::optional<tmm::LayerStack>& dbr,
                              const std::optional<coating::DimpleGeometry>& dimple, const DomainOptions& options) {
    if (!(options.resolution >= minimum_resolution))
        throw BuildError("resolution " + std::to_string(options.resolution) + " is below the floor of 15 cells per wavelength");
    if (!(options.design_wavelength_nm > 0.0)) throw BuildError("design wavelength must be positive");
    if (options.azimuthal_order < 0) throw BuildError("azimuthal order must be >= 0");
    if (!(cavity.length_um > 0.0)) throw BuildError("cavity length must be positive");
    if (!(options.radial_extent_um > 0.0)) throw BuildError("radial extent must be positive");
    if (!(options.fill_permittivity >= 1.0)) throw BuildError("fill permittivity must be >= 1");

    const bool curved = std::isfinite(cavity.mirror_radius_um);
    double depth = 0.0;
    if (curved) {
        if (!(cavity.mirror_radius_um > 0.0)) throw BuildError("mirror radius must be positive");
        if (!dimple) throw BuildError("a curved mirror needs dimple geometry");
        depth = dimple->depth_um;
        if (!(depth > 0.0) || depth > cavity.mirror_radius_um)
            throw BuildError("dimple depth must lie in (0, R_M]");
        if (depth > cavity.length_um) throw BuildError("dimple deeper than the cavity length");
    }

    double max_index = std::sqrt(options.fill_permittivity);
    if (dbr) {
        for (const auto& layer : dbr->layers) {
            if (layer.refractive_index.imag() != 0.0 || layer.dispersion)
                throw BuildError("FDTD layers must have real, dispersionless indices");
            if (!(layer.refractive_index.real() >= 1.0)) throw BuildError("FDTD layer index must be >= 1");
            if (!(layer.thickness_nm >= 0.0)) throw BuildError("negative layer thickness");
            max_index = std::max(max_index, layer.refractive_index.real());
        }
        if (!(dbr->substrate_index >= 1.0)) throw BuildError("substrate index must be >= 1");
        max_index = std::max(max_index, dbr->substrate_index);
    }

    SimulationDomain d;
    d.design_wavelength_nm = options.design_wavelength_nm;
    d.resolution = options.resolution;
    d.max_index = max_index;
    d.azimuthal_order = options.azimuthal_order;
    d.mirror_radius_um = cavity.mirror_radius_um;
    d.cell_um = options.design_wavelength_nm * 1e-3 / (options.resolution * max_index);
    const double h = d.cell_um;

    // DBR rows: interface positions rounded from cumulative thickness, so
    // rounding errors never accumulate beyond half a cell.
    std::vector<int> layer_cells;
    int dbr_cells = 0;
    int substrate_cells = 0;
    if (dbr) {
        double cumulative = 0.0;
        int previous = 0;
        d.layer_rows.push_back(0);
        for (const auto& layer : dbr->layers) {
            cumulative += layer.thickness_nm * 1e-3;
            const int boundary = static_cast<int>(std::lround(cumulative / h));
            layer_cells.push_back(boundary - previous);
            d.layer_rows.push_back(boundary);
            previous = boundary;
        }
        dbr_cells = previous;
        substrate_cells = std::max(1, static_cast<int>(std::lround(options.substrate_thickness_um / h)));
    }
    d.surface_row = dbr_cells + substrate_cells;
    for (auto& row : d.layer_rows) row = d.surface_row - row;

    const int gap_cells = static_cast<int>(std::lround(cavity.length_um / h));
    if (gap_cells < 4) throw BuildError("cavity shorter than four cells");
    d.mirror_apex_row = d.surface_row + gap_cells;
    d.nz = d.mirror_apex_row + 1;
    const int radial_cells = static_cast<int>(std::lround(options.radial_extent_um / h));
    if (radial_cells < 4) throw BuildError("radial extent shorter than four cells");
    d.nr = radial_cells + 1;

    d.permittivity.assign(static_cast<std::size_t>(d.nr) * d.nz, options.fill_permittivity);
    d.pec.assign(d.permittivity.size(), 0);

    if (dbr) {
        const double eps_sub = dbr->substrate_index * dbr->substrate_index;
        for (int k = 0; k < substrate_cells; ++k)
            for (int i = 0; i < d.nr; ++i) d.permittivity[d.cell_index(i, k)] = eps_sub;
        int top = d.surface_row;
        for (std::size_t j = 0; j < dbr->layers.size(); ++j) {
            const double n = dbr->layers[j].refractive_index.real();
            for (int k = top - layer_cells[j]; k < top; ++k)
                for (int i = 0; i < d.nr; ++i) d.permittivity[d.cell_index(i, k)] = n * n;
            top -= layer_cells[j];
        }
    }

    // Conductors above the DBR surface: the top mirror and the side wall.
    const double apex_z = d.mirror_apex_row * h;
    const double center_z = apex_z - cavity.mirror_radius_um;
    const double face_z = apex_z - depth;
    for (int k = d.surface_row; k < d.nz; ++k) {
        const double zc = (k + 0.5) * h;
        for (int i = 0; i < d.nr; ++i) {
            const double rc = (i + 0.5) * h;
            bool conductor = i == d.nr - 1 || k == d.nz - 1;
            if (curved) {
                const double dz = zc - center_z;
                const bool outside_sphere = rc * rc + dz * dz > cavity.mirror_radius_um * cavity.mirror_radius_um;
                conductor = conductor || (zc > face_z && outside_sphere);
            } else {
                conductor = conductor || zc > apex_z;
            }
            if (conductor) {
                d.pec[d.cell_index(i, k)] = 1;
                d.permittivity[d.cell_index(i, k)] = 1.0;
            }
        }
    }
    return d;
}

}  // namespace hcav::fdtd
