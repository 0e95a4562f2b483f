#pragma once

// Coating deposited on a curved dimple: the local layer thickness falls off
// as cos^p(theta) away from the dimple axis, which drags the stop band to
// shorter wavelengths. The optimizer chooses the on-axis thickness scale so
// the working wavelength stays reflected across the mode's solid angle.

#include <optional>
#include <span>
#include <vector>

#include "hemicav/tmm.hpp"

namespace hcav::coating {

struct DimpleGeometry {
    double radius_of_curvature_um = 50.0;
    double opening_half_angle_deg = 0.0;
    double depth_um = 30.0;
    double substrate_thickness_um = 150.0;

    /// Opening half-angle filled in from cos(theta) = 1 - d/R.
    static DimpleGeometry from_depth(double radius_um, double depth_um,
                                     double substrate_thickness_um = 150.0);
    void validate() const;
};

struct DepositionModel {
    double thinning_exponent = 1.0;  // p in cos^p(theta); 0 is a uniform coating

    double thickness_factor(double theta_rad) const;
};

struct CoatingDesign {
    tmm::LayerStack base_stack;
    double center_scale = 1.0;
};

/// Stack realized at polar angle theta: thicknesses times s * cos^p(theta).
tmm::LayerStack local_stack(const CoatingDesign& design, const DepositionModel& model,
                            double theta_rad);

struct ProfilePoint {
    double theta_rad;
    double reflectance;
};

/// Normal-incidence reflectance of the local stack at each angle.
std::vector<ProfilePoint> reflectivity_profile(const CoatingDesign& design,
                                               const DepositionModel& model,
                                               double working_wavelength_nm,
                                               std::span<const double> theta_grid_rad);

/// Uniform grid over [0, max_angle] whose spacing does not exceed `max_step`.
std::vector<double> angle_grid(double max_angle_rad, double max_step_rad);

/// Smallest angle where R drops below the threshold, refined to 0.01 deg.
std::optional<double> cutoff_angle(const CoatingDesign& design, const DepositionModel& model,
                                   double working_wavelength_nm, double reflectance_threshold,
                                   double aperture_rad = 1.5690);

/// min over theta in [0, max_angle] of R(theta; s).
double worst_case_reflectance(const tmm::LayerStack& base_stack, const DepositionModel& model,
                              double working_wavelength_nm, double max_angle_rad, double center_scale,
                              double theta_step_rad);

struct ScaleSearch {
    double scale_min = 0.5;
    double scale_max = 1.6;
    double scale_step = 0.005;
    double theta_step_rad = 0.5 * 3.14159265358979323846 / 180.0;
    double tolerance = 1e-10;
    double acceptable_merit = 0.5;
};

struct ScaleOptimum {
    double center_scale;
    double min_reflectance;
    double bracket_low;
    double bracket_high;
};

/// Coarse scan for a bracket, then golden-section maximization of the
/// worst-case reflectance. Throws OptimizationError when no scale in the
/// interval beats `acceptable_merit`.
ScaleOptimum optimize_center_scale(const tmm::LayerStack& base_stack, const DepositionModel& model,
                                   double working_wavelength_nm, double max_angle_rad,
                                   const ScaleSearch& search = {});

}  // namespace hcav::coating
