#pragma once

// Emitter-cavity coupling estimates and transmission-spectrum analysis.
//
// Linewidth convention: gamma (emitter) and kappa (cavity) are half widths
// at half maximum, in energy units (ueV). A bare cavity line therefore has
// FWHM 2 kappa. The vacuum coupling hbar*g is reported alongside the
// splitting 2 hbar*g.

#include <optional>
#include <span>
#include <vector>

namespace hcav::cqed {

struct Emitter {
    double dipole_moment_debye = 0.0;
    double transition_wavelength_nm = 750.0;
    double linewidth_ueV = 15.0;  // HWHM
    double detuning_ueV = 0.0;    // emitter minus cavity
};

struct CavityLoss {
    double length_um;
    double mirror_reflectivity_product_sqrt;
    double free_spectral_range_thz;
    double finesse;
    double kappa_ueV;  // HWHM
};

struct CouplingReport {
    double coupling_energy_ueV;  // hbar g
    double splitting_ueV;        // 2 hbar g
    double gamma_ueV;
    double kappa_ueV;
    bool strong;
    double margin_ueV;           // splitting - (gamma + kappa)
};

struct TransmissionSpectrum {
    std::vector<double> grid;  // detuning in ueV, or frequency in THz
    std::vector<double> transmission;
};

/// hbar g = d sqrt(hbar w / (2 eps0 V)) for an emitter at a field antinode
/// with its dipole along the mode polarization.
double coupling_energy(const Emitter& emitter, double effective_mode_volume_um3);

/// Symmetric mirrors of reflectivity R separated by `length_um`.
CavityLoss cavity_linewidth(double length_um, double mirror_reflectivity);

/// Strict inequality: a splitting equal to gamma + kappa is not strong.
CouplingReport strong_coupling(double coupling_ueV, double gamma_ueV, double kappa_ueV);

/// Single-mode input-output transmission around one longitudinal resonance
/// at zero detuning. With no emitter (or g = 0) this is the Lorentzian
/// kappa^2 / (delta^2 + kappa^2) with unit peak.
TransmissionSpectrum transmission_spectrum(const CavityLoss& cavity, const std::optional<Emitter>& emitter,
                                           double coupling_ueV, std::span<const double> detuning_grid_ueV);

/// Round-trip amplitude factor rho with pi sqrt(rho)/(1 - rho) = finesse,
/// from the closed-form root.
double round_trip_factor_from_finesse(double finesse);

/// Finesse after an extra single-pass intensity absorption A: rho -> rho (1 - A).
double effective_finesse(double base_finesse, double single_pass_absorption);

/// Airy transmission (1-rho)^2 / (1 + rho^2 - 2 rho cos(2 pi nu / FSR)).
TransmissionSpectrum airy_spectrum(double free_spectral_range, double finesse, std::span<const double> grid);

/// FSR / FWHM averaged over the resolved peaks of a multi-peak spectrum.
double extract_finesse(const TransmissionSpectrum& spectrum);

struct PeakPair {
    double lower_center;
    double upper_center;
    double separation;
    bool central_dip;  // transmission between the peaks falls below both
};

/// The two strongest local maxima, refined parabolically.
PeakPair find_peak_pair(const TransmissionSpectrum& spectrum);

struct NormalModeFit {
    double coupling_ueV;
    double kappa_ueV;
    double gamma_ueV;
    double cavity_center_ueV;
    double emitter_center_ueV;
    double peak_transmission;
    double normal_mode_splitting_ueV;  // real-part separation of the two poles
    double peak_separation_ueV;        // raw maxima separation
};

/// Least-squares fit of the coupled-oscillator lineshape.
NormalModeFit fit_normal_modes(const TransmissionSpectrum& spectrum);

enum class LineShape { Lorentzian, Gaussian, Ambiguous };

struct LineClassification {
    LineShape shape;
    double center;
    double width;           // HWHM of the preferred model
    double residual_ratio;  // SSR(Gaussian) / SSR(Lorentzian)
    double lorentzian_width;
    double gaussian_width;
};

/// Fits Lorentzian and Gaussian (center, HWHM, amplitude, baseline) and
/// classifies by residual ratio with threshold 1.5.
LineClassification classify_line(const TransmissionSpectrum& segment);

const char* to_string(LineShape shape);

}  // namespace hcav::cqed
