#pragma once

// Transfer-matrix (Abeles characteristic matrix) engine for planar
// multilayer stacks.
//
// Phase convention: fields carry the time dependence exp(-i w t), so a wave
// travelling into +z is exp(i(k z - w t)) and absorbing media have
// Im(n) >= 0. Reflection phases are reported in (-pi, pi]. The amplitude r
// is the ratio of tangential electric fields for both polarizations, which
// makes r_TE == r_TM at normal incidence. Every other module (coating,
// fdtd) relies on this single convention.

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace hcav::tmm {

using complex = std::complex<double>;

enum class Polarization { TE, TM };

/// Tabulated complex index, linearly interpolated in wavelength and held
/// constant beyond the table ends.
struct DispersionTable {
    std::vector<double> wavelength_nm;
    std::vector<complex> index;

    complex at(double wavelength_nm) const;
};

struct Layer {
    complex refractive_index{1.0, 0.0};
    double thickness_nm = 0.0;
    std::shared_ptr<const DispersionTable> dispersion;  // optional

    complex index_at(double wavelength_nm) const;
};

/// Ordered layers, incident side first; the substrate is semi-infinite.
struct LayerStack {
    double incident_index = 1.0;
    std::vector<Layer> layers;
    double substrate_index = 1.0;

    /// Throws InputDomainError if an invariant is violated.
    void validate() const;

    /// Copy with every layer thickness multiplied by `factor`.
    LayerStack scaled(double factor) const;

    double total_thickness_nm() const;
    bool lossless() const;
};

struct PlaneWaveQuery {
    double wavelength_nm = 0.0;
    double angle_rad = 0.0;
    Polarization polarization = Polarization::TE;
};

struct StackResponse {
    complex r;
    complex t;
    double R = 0.0;
    double T = 0.0;
    double reflection_phase = 0.0;
};

StackResponse stack_response(const LayerStack& stack, const PlaneWaveQuery& query);

/// (HL)^N or (LH)^N quarter-wave stack at `center_wavelength_nm`. With
/// `cap` an extra layer of the first material is appended, giving
/// (HL)^N H for high_first.
LayerStack quarter_wave_stack(double n_high, double n_low, double substrate_index,
                              double center_wavelength_nm, int num_pairs,
                              bool high_first = true, bool cap = false,
                              double incident_index = 1.0);

struct WavelengthInterval {
    double lower_nm;
    double upper_nm;
    double width_nm() const { return upper_nm - lower_nm; }
};

struct StopBandScan {
    double threshold = 0.95;
    double lower_nm = 400.0;
    double upper_nm = 1200.0;
    double step_nm = 0.5;
    double edge_tolerance_nm = 0.01;
};

/// Maximal contiguous interval around the reflectance maximum where
/// R >= threshold, edges refined by bisection.
std::optional<WavelengthInterval> stop_band(const LayerStack& stack, double angle_rad,
                                            Polarization polarization,
                                            const StopBandScan& scan = {});

/// Airy finesse pi*sqrt(rho)/(1-rho) with rho = sqrt(R1 R2 (1-loss)).
double finesse_from_mirrors(double R1, double R2, double round_trip_intensity_loss = 0.0);

/// Reflectance sweep over wavelengths; OpenMP-parallel over points.
std::vector<StackResponse> sweep(const LayerStack& stack, std::span<const double> wavelengths_nm,
                                 double angle_rad, Polarization polarization);

}  // namespace hcav::tmm
