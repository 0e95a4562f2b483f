#pragma once

// Resonance extraction from probe records and time-averaged mode maps.

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hemicav/fdtd/domain.hpp"
#include "hemicav/fdtd/solver.hpp"

namespace hcav::fdtd {

struct Resonance {
    double frequency_thz;
    double quality_factor;  // infinity when the envelope does not decay
    double power;           // windowed spectral peak power, arbitrary units
};

struct ResonanceOptions {
    std::size_t probe = 0;
    double min_thz = 0.0;
    double max_thz = std::numeric_limits<double>::infinity();
    double noise_factor = 100.0;   // peaks must exceed this multiple of the median power
    double dynamic_range = 1e-9;   // and this fraction of the strongest peak
};

/// Two tones closer than this cannot be separated by a Hann window of
/// length `duration_fs` (mainlobe half-width 2/T).
double resolution_limit_thz(double duration_fs);

/// Hann-windowed spectrum of the samples after the source has ended; peaks
/// refined by Gaussian interpolation; Q from the decay of the band-filtered
/// analytic envelope. Throws AnalysisError if nothing rises above the floor.
std::vector<Resonance> resonances(const ProbeRecord& record, const ResonanceOptions& options = {});

/// Same analysis on a bare uniformly sampled series (first sample at t = 0).
std::vector<Resonance> resonances(std::span<const double> samples, double dt_fs, const ResonanceOptions& options = {});

struct ProfileOptions {
    double bandwidth_thz = 8.0;    // narrowband re-excitation pulse
    double average_cycles = 50.0;  // averaging window after settling
};

struct ModeProfile {
    double resonance_frequency_thz = 0.0;  // requested
    double measured_frequency_thz = 0.0;   // dominant line during averaging
    double quality_factor = 0.0;
    int nr = 0;
    int nz = 0;
    double cell_um = 0.0;
    std::vector<double> energy_density;           // cell centers, nz * nr, phi-averaged
    std::vector<double> electric_energy_density;  // electric part of the same
    double peak_energy_density = 0.0;
    double effective_mode_volume_um3 = 0.0;
    std::optional<double> waist_radius_um;  // none when there is no transverse confinement
    int waist_row = 0;
    double antinode_z_um = 0.0;        // on-axis maximum nearest the DBR surface
    double antinode_relative = 0.0;    // its energy density over the global peak
};

/// Re-excites the domain with a narrow pulse at `resonance_thz`, waits
/// `settle_cycles` after the pulse, then time-averages the energy density.
/// Throws AnalysisError when the excited field is not dominated by a line
/// at the requested frequency.
ModeProfile mode_profile(const SimulationDomain& domain, double resonance_thz, const SourceSpec& source,
                         double settle_cycles, const ProfileOptions& options = {});

}  // namespace hcav::fdtd
