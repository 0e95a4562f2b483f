#pragma once

// Mirror-substrate metrology: roughness PSD, sphere fitting, and the
// scatter-loss ceiling on cavity finesse.
//
// Height maps are row-major in y with x = ix * pitch, y = iy * pitch.
// Heights are in nm, lateral coordinates in um, spatial frequencies in
// 1/mm, and the isotropic PSD in nm^2 mm^2.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hcav::surface {

struct HeightMap {
    int nx = 0;
    int ny = 0;
    double pitch_um = 1.0;
    std::vector<double> heights_nm;
    std::vector<std::uint8_t> valid;  // empty means every pixel is valid

    double at(int ix, int iy) const { return heights_nm[static_cast<std::size_t>(iy) * nx + ix]; }
    bool is_valid(int ix, int iy) const { return valid.empty() || valid[static_cast<std::size_t>(iy) * nx + ix] != 0; }
    bool complete() const;
    void validate() const;
};

enum class Window { None, Hann };
const char* to_string(Window w);
Window window_from_string(const std::string& name);

struct PSDCurve {
    std::vector<double> frequency_per_mm;
    std::vector<double> psd_nm2_mm2;
    Window window = Window::Hann;
    double window_power = 1.0;     // mean of w^2 used for compensation
    double bin_width_per_mm = 0.0;
    double variance_nm2 = 0.0;     // of the detrended map
};

/// Least-squares plane (mean and tilt) removed from a complete map.
HeightMap detrend(const HeightMap& map);

/// Annular average of the 2D periodogram in bins one frequency step wide.
/// Normalized so that the sum of 2 pi f PSD(f) df over the bins equals the
/// window-compensated power of the detrended map.
PSDCurve compute_psd(const HeightMap& map, Window window = Window::Hann);

/// sqrt of the trapezoid integral of 2 pi f PSD(f) over [f_low, f_high].
double rms_in_band(const PSDCurve& psd, double f_low_per_mm, double f_high_per_mm);

struct SphereFit {
    double radius_um = 0.0;
    double center_x_um = 0.0;
    double center_y_um = 0.0;
    double center_z_um = 0.0;
    bool concave = true;  // the sphere center lies above the surface
    double rms_residual_nm = 0.0;
    double max_abs_residual_nm = 0.0;
    double fit_region_diameter_um = 0.0;
    int points = 0;
};

/// Algebraic sphere fit over a circular region, then one Gauss-Newton
/// pass on height residuals. Throws FitError (infinite radius) on flat data.
SphereFit fit_sphere(const HeightMap& map, double center_x_um, double center_y_um, double region_diameter_um);

struct ScatterEstimate {
    double rms_roughness_nm = 0.0;
    double total_integrated_scatter = 0.0;  // per reflection
    double per_bounce_loss = 0.0;
    double finesse_ceiling = 0.0;
};

/// TIS = (4 pi sigma / lambda)^2 on each mirror; ceiling 2 pi / (sum T + sum TIS).
ScatterEstimate scatter_budget(double sigma_nm, double wavelength_nm, std::span<const double> mirror_transmissions);

}  // namespace hcav::surface
