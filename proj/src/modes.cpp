#include "hemicav/modes.hpp"

#include <algorithm>
#include <cmath>

#include "hemicav/constants.hpp"
#include "hemicav/error.hpp"

namespace hcav::modes {

using constants::pi;

void CavityGeometry::validate() const {
    if (!(length_um > 0.0) || !std::isfinite(length_um))
        throw InputDomainError("cavity length must be positive and finite");
    if (!(mirror_radius_um > 0.0)) throw InputDomainError("mirror radius must be positive");
}

Stability stability(const CavityGeometry& geometry) {
    geometry.validate();
    const double g1 = 1.0;
    const double g2 = 1.0 - geometry.length_um / geometry.mirror_radius_um;
    const double g = g1 * g2;
    return {g1, g2, g >= 0.0 && g <= 1.0, g == 0.0 || g == 1.0};
}

namespace {

double strict_g(const CavityGeometry& geometry) {
    const auto s = stability(geometry);
    const double g = s.g1 * s.g2;
    if (!(g > 0.0 && g < 1.0))
        throw DegenerateGeometryError("paraxial mode needs a strictly stable cavity (0 < g1 g2 < 1)");
    return g;
}

void check_wavelength(double wavelength_nm) {
    if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm))
        throw InputDomainError("wavelength must be positive");
}

}  // namespace

double effective_mode_volume(double waist_radius_um, double length_um) {
    return pi * waist_radius_um * waist_radius_um * length_um / 4.0;
}

GaussianModeParams gaussian_mode(const CavityGeometry& geometry, double wavelength_nm) {
    strict_g(geometry);
    check_wavelength(wavelength_nm);
    const double lambda_um = wavelength_nm * 1e-3;
    const double L = geometry.length_um;
    const double R = geometry.mirror_radius_um;
    const double w0 = std::sqrt(lambda_um / pi * std::sqrt(L * (R - L)));
    return {w0, pi * w0 * w0 / lambda_um, lambda_um / (pi * w0), effective_mode_volume(w0, L)};
}

double free_spectral_range_thz(double length_um) {
    if (!(length_um > 0.0)) throw InputDomainError("cavity length must be positive");
    return constants::c_um_thz / (2.0 * length_um);
}

double transverse_spacing_thz(const CavityGeometry& geometry) {
    const auto s = stability(geometry);
    const double g = s.g1 * s.g2;
    if (!(g > 0.0 && g <= 1.0))
        throw DegenerateGeometryError("mode spectrum needs 0 < g1 g2 <= 1");
    return free_spectral_range_thz(geometry.length_um) * std::acos(std::sqrt(g)) / pi;
}

ModeSpectrum mode_spectrum(const CavityGeometry& geometry, double min_wavelength_nm,
                           double max_wavelength_nm, int max_transverse_order) {
    check_wavelength(min_wavelength_nm);
    if (!(max_wavelength_nm > min_wavelength_nm)) throw InputDomainError("empty wavelength window");
    if (max_transverse_order < 0) throw InputDomainError("transverse order must be >= 0");

    const double fsr = free_spectral_range_thz(geometry.length_um);
    const double spacing = transverse_spacing_thz(geometry);
    const double f_lo = constants::c_um_thz / (max_wavelength_nm * 1e-3);
    const double f_hi = constants::c_um_thz / (min_wavelength_nm * 1e-3);

    ModeSpectrum out;
    const int q_min = std::max(0, static_cast<int>(std::floor(f_lo / fsr)) - max_transverse_order - 1);
    const int q_max = static_cast<int>(std::ceil(f_hi / fsr));
    for (int q = q_min; q <= q_max; ++q) {
        for (int n = 0; n <= max_transverse_order; ++n) {
            const double f = fsr * q + spacing * (n + 1);
            if (f < f_lo || f > f_hi || !(f > 0.0)) continue;
            out.push_back({q, n, f, constants::c_um_thz / f * 1e3});
        }
    }
    return out;
}

double mode_waist_from_divergence(double theta_c_rad, double wavelength_nm) {
    if (!(theta_c_rad > 0.0 && theta_c_rad < pi / 2))
        throw InputDomainError("divergence angle must lie in (0, pi/2)");
    check_wavelength(wavelength_nm);
    return wavelength_nm * 1e-3 / (pi * theta_c_rad);
}

double divergence_from_waist(double waist_radius_um, double wavelength_nm) {
    if (!(waist_radius_um > 0.0)) throw InputDomainError("waist must be positive");
    check_wavelength(wavelength_nm);
    return wavelength_nm * 1e-3 / (pi * waist_radius_um);
}

}  // namespace hcav::modes
