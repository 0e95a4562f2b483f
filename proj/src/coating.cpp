#include "hemicav/coating.hpp"

#include <algorithm>
#include <cmath>

#include "hemicav/constants.hpp"
#include "hemicav/error.hpp"

namespace hcav::coating {

namespace {

constexpr double deg = constants::pi / 180.0;

void check_theta(double theta_rad) {
    if (!(theta_rad >= 0.0 && theta_rad < constants::pi / 2))
        throw InputDomainError("polar angle must lie in [0, pi/2)");
}

double normal_reflectance(const tmm::LayerStack& stack, double wavelength_nm) {
    return tmm::stack_response(stack, {wavelength_nm, 0.0, tmm::Polarization::TE}).R;
}

}  // namespace

DimpleGeometry DimpleGeometry::from_depth(double radius_um, double depth_um,
                                          double substrate_thickness_um) {
    DimpleGeometry g{radius_um, 0.0, depth_um, substrate_thickness_um};
    if (!(radius_um > 0.0) || !(depth_um > 0.0) || !(depth_um < radius_um))
        throw InputDomainError("dimple needs 0 < depth < radius of curvature");
    g.opening_half_angle_deg = std::acos(1.0 - depth_um / radius_um) / deg;
    return g;
}

void DimpleGeometry::validate() const {
    if (!(depth_um > 0.0) || !(depth_um < radius_of_curvature_um))
        throw InputDomainError("dimple needs 0 < depth < radius of curvature");
    const double expected = std::acos(1.0 - depth_um / radius_of_curvature_um);
    if (std::abs(std::cos(opening_half_angle_deg * deg) - std::cos(expected)) > 1e-6)
        throw InputDomainError("dimple opening angle inconsistent with depth and radius");
}

double DepositionModel::thickness_factor(double theta_rad) const {
    if (!(thinning_exponent >= 0.0)) throw InputDomainError("thinning exponent must be >= 0");
    check_theta(theta_rad);
    if (thinning_exponent == 0.0) return 1.0;
    return std::pow(std::cos(theta_rad), thinning_exponent);
}

tmm::LayerStack local_stack(const CoatingDesign& design, const DepositionModel& model,
                            double theta_rad) {
    if (!(design.center_scale > 0.0)) throw InputDomainError("center scale must be positive");
    return design.base_stack.scaled(design.center_scale * model.thickness_factor(theta_rad));
}

std::vector<ProfilePoint> reflectivity_profile(const CoatingDesign& design,
                                               const DepositionModel& model,
                                               double working_wavelength_nm,
                                               std::span<const double> theta_grid_rad) {
    // Validate serially; the parallel loop below must not throw.
    std::vector<tmm::LayerStack> stacks;
    stacks.reserve(theta_grid_rad.size());
    for (double th : theta_grid_rad) stacks.push_back(local_stack(design, model, th));
    if (!(working_wavelength_nm > 0.0)) throw InputDomainError("working wavelength must be positive");

    std::vector<ProfilePoint> out(theta_grid_rad.size());
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = {theta_grid_rad[k], normal_reflectance(stacks[k], working_wavelength_nm)};
    }
    return out;
}

std::vector<double> angle_grid(double max_angle_rad, double max_step_rad) {
    if (!(max_angle_rad >= 0.0) || !(max_step_rad > 0.0))
        throw InputDomainError("angle grid needs max_angle >= 0 and step > 0");
    const auto intervals = static_cast<std::size_t>(std::ceil(max_angle_rad / max_step_rad - 1e-12));
    std::vector<double> grid(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        grid[i] = intervals == 0 ? 0.0 : max_angle_rad * static_cast<double>(i) / static_cast<double>(intervals);
    return grid;
}

std::optional<double> cutoff_angle(const CoatingDesign& design, const DepositionModel& model,
                                   double working_wavelength_nm, double reflectance_threshold,
                                   double aperture_rad) {
    if (!(reflectance_threshold > 0.0 && reflectance_threshold < 1.0))
        throw InputDomainError("reflectance threshold must lie in (0, 1)");
    check_theta(aperture_rad);

    auto reflectance = [&](double th) {
        return normal_reflectance(local_stack(design, model, th), working_wavelength_nm);
    };
    const auto grid = angle_grid(aperture_rad, 0.25 * deg);
    const auto profile = reflectivity_profile(design, model, working_wavelength_nm, grid);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile[i].reflectance >= reflectance_threshold) continue;
        if (i == 0) return 0.0;
        double inside = grid[i - 1], outside = grid[i];
        while (outside - inside > 0.01 * deg) {
            const double mid = 0.5 * (inside + outside);
            (reflectance(mid) >= reflectance_threshold ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    }
    return std::nullopt;
}

double worst_case_reflectance(const tmm::LayerStack& base_stack, const DepositionModel& model,
                              double working_wavelength_nm, double max_angle_rad, double center_scale,
                              double theta_step_rad) {
    const auto grid = angle_grid(max_angle_rad, theta_step_rad);
    const auto profile =
        reflectivity_profile({base_stack, center_scale}, model, working_wavelength_nm, grid);
    double worst = 1.0;
    for (const auto& p : profile) worst = std::min(worst, p.reflectance);
    return worst;
}

ScaleOptimum optimize_center_scale(const tmm::LayerStack& base_stack, const DepositionModel& model,
                                   double working_wavelength_nm, double max_angle_rad,
                                   const ScaleSearch& search) {
    if (!(search.scale_min > 0.0 && search.scale_max > search.scale_min && search.scale_step > 0.0))
        throw InputDomainError("scale search interval is empty");
    if (!(search.theta_step_rad > 0.0 && search.theta_step_rad <= 0.5 * deg + 1e-15))
        throw InputDomainError("theta grid spacing must be positive and at most 0.5 deg");
    check_theta(max_angle_rad);

    auto merit = [&](double s) {
        return worst_case_reflectance(base_stack, model, working_wavelength_nm, max_angle_rad, s,
                                      search.theta_step_rad);
    };

    const auto n = static_cast<std::size_t>(std::floor((search.scale_max - search.scale_min) / search.scale_step)) + 1;
    std::vector<double> scales(n), merits(n);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        scales[i] = search.scale_min + static_cast<double>(i) * search.scale_step;
        merits[i] = merit(scales[i]);
        if (merits[i] > merits[best]) best = i;
    }
    if (!(merits[best] > search.acceptable_merit))
        throw OptimizationError("no center scale reaches the acceptable worst-case reflectance",
                                scales[best], merits[best]);

    double a = scales[best > 0 ? best - 1 : best];
    double b = scales[best + 1 < n ? best + 1 : best];
    ScaleOptimum result{scales[best], merits[best], a, b};

    // Golden-section search for the maximum inside [a, b].
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = merit(c), fd = merit(d);
    while (b - a > search.tolerance) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = merit(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = merit(d);
        }
    }
    const double s = 0.5 * (a + b);
    const double fs = merit(s);
    if (fs > result.min_reflectance) {
        result.center_scale = s;
        result.min_reflectance = fs;
    }
    return result;
}

}  // namespace hcav::coating
