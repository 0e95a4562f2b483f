#pragma once

// Paraxial plano-concave resonator: planar mirror (g1 = 1) facing a
// spherical mirror of radius R_M at distance L.

#include <limits>
#include <vector>

namespace hcav::modes {

struct CavityGeometry {
    double length_um = 0.0;
    double mirror_radius_um = std::numeric_limits<double>::infinity();  // inf: planar

    void validate() const;
};

struct Stability {
    double g1;
    double g2;
    bool stable;
    bool marginal;
};

Stability stability(const CavityGeometry& geometry);

/// w0 is the 1/e amplitude radius at the planar mirror.
struct GaussianModeParams {
    double waist_radius_um;
    double rayleigh_range_um;
    double divergence_half_angle_rad;
    double effective_mode_volume_um3;
};

/// Rejects marginal and unstable geometries with DegenerateGeometryError.
GaussianModeParams gaussian_mode(const CavityGeometry& geometry, double wavelength_nm);

/// pi w0^2 L / 4.
double effective_mode_volume(double waist_radius_um, double length_um);

struct ModeLine {
    int longitudinal_index;  // q
    int transverse_order;    // n
    double frequency_thz;
    double wavelength_nm;
};

using ModeSpectrum = std::vector<ModeLine>;

/// nu(q, n) = (c/2L) (q + (n + 1) arccos(sqrt(g1 g2)) / pi), restricted to
/// the vacuum-wavelength window; sorted by q then n.
ModeSpectrum mode_spectrum(const CavityGeometry& geometry, double min_wavelength_nm,
                           double max_wavelength_nm, int max_transverse_order);

double free_spectral_range_thz(double length_um);

/// Transverse-mode spacing (c/2L) arccos(sqrt(g1 g2))/pi.
double transverse_spacing_thz(const CavityGeometry& geometry);

/// Paraxial w0 = lambda / (pi theta).
double mode_waist_from_divergence(double theta_c_rad, double wavelength_nm);

/// Paraxial theta = lambda / (pi w0).
double divergence_from_waist(double waist_radius_um, double wavelength_nm);

}  // namespace hcav::modes
