#include "hemicav/cqed.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "hemicav/constants.hpp"
#include "hemicav/error.hpp"
#include "hemicav/least_squares.hpp"
#include "hemicav/tmm.hpp"

namespace hcav::cqed {

using constants::pi;
using cplx = std::complex<double>;

namespace {

void check_spectrum(const TransmissionSpectrum& s, std::size_t min_points) {
    if (s.grid.size() != s.transmission.size())
        throw InputDomainError("spectrum grid and values differ in length");
    if (s.grid.size() < min_points) throw AnalysisError("spectrum has too few points");
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        if (!std::isfinite(s.grid[i]) || !std::isfinite(s.transmission[i]))
            throw InputDomainError("spectrum contains non-finite values");
        if (i > 0 && !(s.grid[i] > s.grid[i - 1]))
            throw InputDomainError("spectrum grid must be strictly increasing");
    }
}

// Vertex of the parabola through three neighbouring samples.
double parabolic_center(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
    if (i == 0 || i + 1 >= x.size()) return x[i];
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (curvature >= 0.0) return x1;
    return 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
}

double lerp_crossing(double xa, double ya, double xb, double yb, double level) {
    if (yb == ya) return 0.5 * (xa + xb);
    return xa + (level - ya) * (xb - xa) / (yb - ya);
}

double airy_finesse(double rho) { return pi * std::sqrt(rho) / (1.0 - rho); }

}  // namespace

double coupling_energy(const Emitter& emitter, double effective_mode_volume_um3) {
    if (!(effective_mode_volume_um3 > 0.0) || !std::isfinite(effective_mode_volume_um3))
        throw InputDomainError("effective mode volume must be positive");
    if (!(emitter.dipole_moment_debye >= 0.0)) throw InputDomainError("dipole moment must be >= 0");
    if (!(emitter.transition_wavelength_nm > 0.0)) throw InputDomainError("transition wavelength must be positive");
    const double omega = 2.0 * pi * constants::speed_of_light / (emitter.transition_wavelength_nm * 1e-9);
    const double volume_m3 = effective_mode_volume_um3 * 1e-18;
    const double field = std::sqrt(constants::hbar * omega / (2.0 * constants::vacuum_permittivity * volume_m3));
    const double energy_J = emitter.dipole_moment_debye * constants::debye * field;
    return energy_J * constants::joule_to_micro_ev;
}

CavityLoss cavity_linewidth(double length_um, double mirror_reflectivity) {
    if (!(length_um > 0.0)) throw InputDomainError("cavity length must be positive");
    const double finesse = tmm::finesse_from_mirrors(mirror_reflectivity, mirror_reflectivity, 0.0);
    const double fsr = constants::c_um_thz / (2.0 * length_um);
    const double kappa = constants::h_ueV_per_THz * fsr / finesse / 2.0;
    return {length_um, mirror_reflectivity, fsr, finesse, kappa};
}

CouplingReport strong_coupling(double coupling_ueV, double gamma_ueV, double kappa_ueV) {
    if (!(coupling_ueV >= 0.0 && gamma_ueV >= 0.0 && kappa_ueV >= 0.0))
        throw InputDomainError("coupling and linewidths must be nonnegative");
    const double splitting = 2.0 * coupling_ueV;
    const double margin = splitting - (gamma_ueV + kappa_ueV);
    return {coupling_ueV, splitting, gamma_ueV, kappa_ueV, margin > 0.0, margin};
}

TransmissionSpectrum transmission_spectrum(const CavityLoss& cavity, const std::optional<Emitter>& emitter,
                                           double coupling_ueV, std::span<const double> detuning_grid_ueV) {
    const double kappa = cavity.kappa_ueV;
    if (!(kappa > 0.0)) throw InputDomainError("cavity linewidth must be positive");
    TransmissionSpectrum out;
    out.grid.assign(detuning_grid_ueV.begin(), detuning_grid_ueV.end());
    out.transmission.resize(out.grid.size());
    for (std::size_t i = 1; i < out.grid.size(); ++i)
        if (!(out.grid[i] > out.grid[i - 1])) throw InputDomainError("detuning grid must be increasing");

    const bool coupled = emitter.has_value() && coupling_ueV != 0.0;
    if (coupled && !(emitter->linewidth_ueV > 0.0)) throw InputDomainError("emitter linewidth must be positive");
    const double g2 = coupled ? coupling_ueV * coupling_ueV : 0.0;

    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double d = out.grid[i];
        cplx denom{kappa, d};
        if (coupled) denom += g2 / cplx{emitter->linewidth_ueV, d - emitter->detuning_ueV};
        out.transmission[i] = kappa * kappa / std::norm(denom);
    }
    return out;
}

double round_trip_factor_from_finesse(double finesse) {
    if (!(finesse > 0.0) || !std::isfinite(finesse)) throw InputDomainError("finesse must be positive");
    // F x^2 + pi x - F = 0 with x = sqrt(rho); the rationalized root avoids cancellation.
    const double x = 2.0 * finesse / (constants::pi + std::sqrt(constants::pi * constants::pi + 4.0 * finesse * finesse));
    return x * x;
}

double effective_finesse(double base_finesse, double single_pass_absorption) {
    if (!(single_pass_absorption >= 0.0 && single_pass_absorption < 1.0))
        throw InputDomainError("single-pass absorption must lie in [0, 1)");
    const double rho = round_trip_factor_from_finesse(base_finesse) * (1.0 - single_pass_absorption);
    return airy_finesse(rho);
}

TransmissionSpectrum airy_spectrum(double free_spectral_range, double finesse, std::span<const double> grid) {
    if (!(free_spectral_range > 0.0)) throw InputDomainError("free spectral range must be positive");
    const double rho = round_trip_factor_from_finesse(finesse);
    TransmissionSpectrum out{{grid.begin(), grid.end()}, std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double phase = 2.0 * pi * grid[i] / free_spectral_range;
        out.transmission[i] = (1.0 - rho) * (1.0 - rho) / (1.0 + rho * rho - 2.0 * rho * std::cos(phase));
    }
    return out;
}

double extract_finesse(const TransmissionSpectrum& spectrum) {
    check_spectrum(spectrum, 5);
    const auto& x = spectrum.grid;
    const auto& y = spectrum.transmission;
    const std::size_t n = x.size();
    const auto [mn_it, mx_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *mn_it, hi = *mx_it;
    if (!(hi - lo > 1e-9 * std::max(std::abs(hi), 1e-300))) throw AnalysisError("spectrum is flat: no peaks");

    // Peaks: contiguous runs above the global half level.
    const double level = lo + 0.5 * (hi - lo);
    struct Peak {
        std::size_t index;
        double center;
        std::optional<double> fwhm;
        bool interior;
    };
    std::vector<Peak> peaks;
    for (std::size_t i = 0; i < n;) {
        if (y[i] <= level) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::size_t best = i;
        while (j < n && y[j] > level) {
            if (y[j] > y[best]) best = j;
            ++j;
        }
        const bool interior = i > 0 && j < n;
        peaks.push_back({best, parabolic_center(x, y, best), std::nullopt, interior});
        i = j;
    }

    for (std::size_t p = 0; p < peaks.size(); ++p) {
        auto& pk = peaks[p];
        if (!pk.interior) continue;
        const double half = lo + 0.5 * (y[pk.index] - lo);
        const std::size_t left_stop = p > 0 ? peaks[p - 1].index : 0;
        const std::size_t right_stop = p + 1 < peaks.size() ? peaks[p + 1].index : n - 1;
        std::size_t a = pk.index;
        while (a > left_stop && y[a] > half) --a;
        std::size_t b = pk.index;
        while (b < right_stop && y[b] > half) ++b;
        if (y[a] > half || y[b] > half) throw AnalysisError("peaks overlap: no half-maximum crossing between them");
        const double left = lerp_crossing(x[a], y[a], x[a + 1], y[a + 1], half);
        const double right = lerp_crossing(x[b - 1], y[b - 1], x[b], y[b], half);
        pk.fwhm = right - left;
    }

    std::vector<double> centers;
    for (const auto& pk : peaks)
        if (pk.interior) centers.push_back(pk.center);
    if (centers.size() < 2) throw AnalysisError("finesse extraction needs at least two resolved peaks");
    double spacing = 0.0;
    for (std::size_t i = 1; i < centers.size(); ++i) spacing += centers[i] - centers[i - 1];
    spacing /= static_cast<double>(centers.size() - 1);

    double sum = 0.0;
    int count = 0;
    for (const auto& pk : peaks) {
        if (!pk.fwhm) continue;
        if (*pk.fwhm > 0.8 * spacing) throw AnalysisError("peaks overlap: FWHM exceeds 0.8 of the spacing");
        sum += spacing / *pk.fwhm;
        ++count;
    }
    return sum / count;
}

PeakPair find_peak_pair(const TransmissionSpectrum& spectrum) {
    check_spectrum(spectrum, 5);
    const auto& x = spectrum.grid;
    const auto& y = spectrum.transmission;
    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) maxima.push_back(i);
    if (maxima.size() < 2) throw AnalysisError("spectrum has fewer than two local maxima");
    std::partial_sort(maxima.begin(), maxima.begin() + 2, maxima.end(),
                      [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
    std::size_t a = std::min(maxima[0], maxima[1]);
    std::size_t b = std::max(maxima[0], maxima[1]);
    const double between = *std::min_element(y.begin() + static_cast<std::ptrdiff_t>(a),
                                             y.begin() + static_cast<std::ptrdiff_t>(b) + 1);
    PeakPair out;
    out.lower_center = parabolic_center(x, y, a);
    out.upper_center = parabolic_center(x, y, b);
    out.separation = out.upper_center - out.lower_center;
    out.central_dip = between < std::min(y[a], y[b]);
    return out;
}

NormalModeFit fit_normal_modes(const TransmissionSpectrum& spectrum) {
    const PeakPair pair = find_peak_pair(spectrum);
    const auto& x = spectrum.grid;
    const auto& y = spectrum.transmission;
    const std::size_t n = x.size();

    // Half width of the stronger peak seeds both kappa and gamma.
    const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double half = 0.5 * y[top];
    std::size_t a = top, b = top;
    while (a > 0 && y[a] > half) --a;
    while (b + 1 < n && y[b] > half) ++b;
    const double hw = std::max(0.5 * (x[b] - x[a]), x[1] - x[0]);

    auto model = [&](const Eigen::VectorXd& p, double d) {
        const double g = p[0], kappa = std::abs(p[1]), gamma = std::abs(p[2]);
        const cplx denom = cplx{kappa, d - p[3]} + g * g / cplx{gamma, d - p[4]};
        return p[5] * kappa * kappa / std::norm(denom);
    };

    Eigen::VectorXd p(6);
    const double mid = 0.5 * (pair.lower_center + pair.upper_center);
    p << 0.5 * pair.separation, hw, hw, mid, mid, 1.0;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = model(p, x[i]);
        num += m * y[i];
        den += m * m;
    }
    if (den > 0.0) p[5] = num / den;

    auto residuals = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = model(q, x[i]) - y[i];
        return r;
    };
    const auto fit = fit::levenberg_marquardt(residuals, p, {500, 1e-14});
    if (!fit.converged) throw AnalysisError("normal-mode fit did not converge");

    NormalModeFit out;
    out.coupling_ueV = std::abs(fit.params[0]);
    out.kappa_ueV = std::abs(fit.params[1]);
    out.gamma_ueV = std::abs(fit.params[2]);
    out.cavity_center_ueV = fit.params[3];
    out.emitter_center_ueV = fit.params[4];
    out.peak_transmission = fit.params[5];
    out.peak_separation_ueV = pair.separation;

    // Poles: x^2 - (dc + de + i(k + g)) x + dc de + i(k de + g dc) - k g - g^2 = 0
    const double dc = out.cavity_center_ueV, de = out.emitter_center_ueV;
    const double k = out.kappa_ueV, gm = out.gamma_ueV, g = out.coupling_ueV;
    const cplx B = cplx{dc + de, k + gm};
    const cplx C = cplx{dc * de - k * gm - g * g, k * de + gm * dc};
    const cplx disc = std::sqrt(B * B - 4.0 * C);
    out.normal_mode_splitting_ueV = std::abs(disc.real());
    return out;
}

LineClassification classify_line(const TransmissionSpectrum& segment) {
    check_spectrum(segment, 8);
    const auto& x = segment.grid;
    const auto& y = segment.transmission;
    const std::size_t n = x.size();

    const auto [mn_it, mx_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *mn_it, hi = *mx_it;
    if (!(hi - lo > 1e-9 * std::max({std::abs(hi), std::abs(lo), 1e-300})))
        throw AnalysisError("line segment has no peak");

    // Moment-style starting point: baseline from the edges, width from the
    // half-maximum crossings around the maximum.
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::vector<double> edges(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(edge));
    edges.insert(edges.end(), y.end() - static_cast<std::ptrdiff_t>(edge), y.end());
    std::nth_element(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(edges.size() / 2), edges.end());
    const double baseline = edges[edges.size() / 2];
    const auto top = static_cast<std::size_t>(mx_it - y.begin());
    const double amplitude = hi - baseline;
    const double half = baseline + 0.5 * amplitude;
    std::size_t a = top, b = top;
    while (a > 0 && y[a] > half) --a;
    while (b + 1 < n && y[b] > half) ++b;
    const double hwhm0 = std::max(0.5 * (x[b] - x[a]), x[1] - x[0]);

    const double ln2 = std::log(2.0);
    auto lorentz = [](const Eigen::VectorXd& p, double t) {
        const double u = (t - p[0]) / p[1];
        return p[3] + p[2] / (1.0 + u * u);
    };
    auto gauss = [ln2](const Eigen::VectorXd& p, double t) {
        const double u = (t - p[0]) / p[1];
        return p[3] + p[2] * std::exp(-ln2 * u * u);
    };

    Eigen::VectorXd p0(4);
    p0 << x[top], hwhm0, amplitude, baseline;

    auto run = [&](auto shape) {
        auto residuals = [&](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = shape(p, x[i]) - y[i];
            return r;
        };
        auto fit = fit::levenberg_marquardt(residuals, p0);
        if (!fit.converged) throw AnalysisError("line-shape fit did not converge");
        fit.params[1] = std::abs(fit.params[1]);
        return fit;
    };
    const auto lf = run(lorentz);
    const auto gf = run(gauss);

    const double tiny = 1e-300;
    const double ratio = gf.cost / std::max(lf.cost, tiny);
    LineClassification out;
    out.residual_ratio = ratio;
    out.lorentzian_width = lf.params[1];
    out.gaussian_width = gf.params[1];
    constexpr double threshold = 1.5;
    if (ratio > threshold) {
        out.shape = LineShape::Lorentzian;
        out.center = lf.params[0];
        out.width = lf.params[1];
    } else if (ratio < 1.0 / threshold) {
        out.shape = LineShape::Gaussian;
        out.center = gf.params[0];
        out.width = gf.params[1];
    } else {
        out.shape = LineShape::Ambiguous;
        const bool lor = lf.cost <= gf.cost;
        out.center = lor ? lf.params[0] : gf.params[0];
        out.width = lor ? lf.params[1] : gf.params[1];
    }
    return out;
}

const char* to_string(LineShape shape) {
    switch (shape) {
        case LineShape::Lorentzian: return "lorentzian";
        case LineShape::Gaussian: return "gaussian";
        case LineShape::Ambiguous: return "ambiguous";
    }
    return "unknown";
}

}  // namespace hcav::cqed
