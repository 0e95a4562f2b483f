#include "hemicav/tmm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hemicav/constants.hpp"
#include "hemicav/error.hpp"

namespace hcav::tmm {

namespace {

constexpr complex I{0.0, 1.0};

bool finite(complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Normalized longitudinal wavevector n*cos(theta) with the decaying branch.
complex longitudinal(complex n, double transverse) {
    complex q = std::sqrt(n * n - transverse * transverse);
    if (q.imag() < 0.0 || (q.imag() == 0.0 && q.real() < 0.0)) q = -q;
    return q;
}

// sin(x)/x, accurate near zero.
complex sinc(complex x) {
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

struct Matrix2 {
    complex a, b, c, d;
    Matrix2 operator*(const Matrix2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

void check_query(const PlaneWaveQuery& q) {
    if (!std::isfinite(q.wavelength_nm) || !std::isfinite(q.angle_rad))
        throw InputDomainError("plane-wave query has non-finite fields");
    if (q.wavelength_nm <= 0.0) throw InputDomainError("wavelength must be positive");
    if (q.angle_rad < 0.0 || q.angle_rad >= constants::pi / 2)
        throw InputDomainError("incidence angle must lie in [0, pi/2)");
}

}  // namespace

complex DispersionTable::at(double wavelength_nm) const {
    if (this->wavelength_nm.empty()) throw InputDomainError("empty dispersion table");
    const auto& w = this->wavelength_nm;
    if (wavelength_nm <= w.front()) return index.front();
    if (wavelength_nm >= w.back()) return index.back();
    auto hi = std::upper_bound(w.begin(), w.end(), wavelength_nm);
    const auto k = static_cast<std::size_t>(hi - w.begin());
    const double f = (wavelength_nm - w[k - 1]) / (w[k] - w[k - 1]);
    return index[k - 1] + f * (index[k] - index[k - 1]);
}

complex Layer::index_at(double wavelength_nm) const {
    return dispersion ? dispersion->at(wavelength_nm) : refractive_index;
}

void LayerStack::validate() const {
    if (!(incident_index >= 1.0) || !(substrate_index >= 1.0) || !std::isfinite(incident_index) ||
        !std::isfinite(substrate_index))
        throw InputDomainError("incident and substrate indices must be finite and >= 1");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (!(l.thickness_nm > 0.0) || !std::isfinite(l.thickness_nm))
            throw InputDomainError("layer " + std::to_string(i) + ": thickness must be > 0");
        if (!finite(l.refractive_index) || !(l.refractive_index.real() > 0.0) ||
            l.refractive_index.imag() < 0.0)
            throw InputDomainError("layer " + std::to_string(i) +
                                   ": index needs Re(n) > 0 and Im(n) >= 0");
        if (l.dispersion) {
            const auto& t = *l.dispersion;
            if (t.wavelength_nm.size() != t.index.size() || t.wavelength_nm.empty() ||
                !std::is_sorted(t.wavelength_nm.begin(), t.wavelength_nm.end()))
                throw InputDomainError("layer " + std::to_string(i) + ": malformed dispersion table");
        }
    }
}

LayerStack LayerStack::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw InputDomainError("thickness scale factor must be positive");
    LayerStack out = *this;
    for (auto& l : out.layers) l.thickness_nm *= factor;
    return out;
}

double LayerStack::total_thickness_nm() const {
    double sum = 0.0;
    for (const auto& l : layers) sum += l.thickness_nm;
    return sum;
}

bool LayerStack::lossless() const {
    return std::all_of(layers.begin(), layers.end(), [](const Layer& l) {
        if (l.dispersion)
            return std::all_of(l.dispersion->index.begin(), l.dispersion->index.end(),
                               [](complex n) { return n.imag() == 0.0; });
        return l.refractive_index.imag() == 0.0;
    });
}

StackResponse stack_response(const LayerStack& stack, const PlaneWaveQuery& query) {
    check_query(query);
    stack.validate();

    const double k0 = 2.0 * constants::pi / query.wavelength_nm;
    const double n0 = stack.incident_index;
    const double transverse = n0 * std::sin(query.angle_rad);
    const bool te = query.polarization == Polarization::TE;

    // Tangential admittance (units of the vacuum admittance).
    auto admittance = [te](complex n, complex q) { return te ? q : n * n / q; };

    Matrix2 m{1.0, 0.0, 0.0, 1.0};
    for (const auto& layer : stack.layers) {
        const complex n = layer.index_at(query.wavelength_nm);
        const complex q = longitudinal(n, transverse);
        const complex delta = k0 * layer.thickness_nm * q;
        // sin(delta)/q written through sinc so that q -> 0 stays finite.
        const complex sin_over_q = k0 * layer.thickness_nm * sinc(delta);
        complex b, c;
        if (te) {
            b = -I * sin_over_q;              // -i sin(delta) / eta
            c = -I * q * std::sin(delta);     // -i eta sin(delta)
        } else {
            b = -I * q * std::sin(delta) / (n * n);
            c = -I * n * n * sin_over_q;
        }
        m = m * Matrix2{std::cos(delta), b, c, std::cos(delta)};
    }

    const complex q0 = longitudinal(complex(n0), transverse);
    const complex qs = longitudinal(complex(stack.substrate_index), transverse);
    const complex eta0 = admittance(complex(n0), q0);
    const complex etas = admittance(complex(stack.substrate_index), qs);

    const complex B = m.a + m.b * etas;
    const complex C = m.c + m.d * etas;
    const complex denom = eta0 * B + C;

    StackResponse out;
    out.r = (eta0 * B - C) / denom;
    out.t = 2.0 * eta0 / denom;
    out.R = std::norm(out.r);
    out.T = etas.real() / eta0.real() * std::norm(out.t);
    double phase = std::arg(out.r);
    if (phase <= -constants::pi) phase = constants::pi;
    out.reflection_phase = phase;
    return out;
}

LayerStack quarter_wave_stack(double n_high, double n_low, double substrate_index,
                              double center_wavelength_nm, int num_pairs, bool high_first,
                              bool cap, double incident_index) {
    if (!(n_high > 1.0) || !(n_low > 1.0))
        throw InputDomainError("quarter-wave indices must exceed 1");
    if (num_pairs < 1) throw InputDomainError("quarter-wave stack needs at least one pair");
    if (!(center_wavelength_nm > 0.0)) throw InputDomainError("center wavelength must be positive");

    auto quarter = [&](double n) { return Layer{{n, 0.0}, center_wavelength_nm / (4.0 * n), {}}; };
    const Layer first = quarter(high_first ? n_high : n_low);
    const Layer second = quarter(high_first ? n_low : n_high);

    LayerStack stack;
    stack.incident_index = incident_index;
    stack.substrate_index = substrate_index;
    for (int p = 0; p < num_pairs; ++p) {
        stack.layers.push_back(first);
        stack.layers.push_back(second);
    }
    if (cap) stack.layers.push_back(first);
    stack.validate();
    return stack;
}

std::optional<WavelengthInterval> stop_band(const LayerStack& stack, double angle_rad,
                                            Polarization polarization, const StopBandScan& scan) {
    if (!(scan.upper_nm > scan.lower_nm)) throw InputDomainError("stop-band scan range is empty");
    if (!(scan.step_nm > 0.0)) throw InputDomainError("stop-band scan step must be positive");
    if (!(scan.threshold > 0.0 && scan.threshold < 1.0))
        throw InputDomainError("stop-band threshold must lie in (0, 1)");

    const auto n = static_cast<std::size_t>(std::floor((scan.upper_nm - scan.lower_nm) / scan.step_nm)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = scan.lower_nm + static_cast<double>(i) * scan.step_nm;
    const auto resp = sweep(stack, grid, angle_rad, polarization);

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (resp[i].R > resp[best].R) best = i;
    if (resp[best].R < scan.threshold) return std::nullopt;

    auto reflectance = [&](double wl) {
        return stack_response(stack, {wl, angle_rad, polarization}).R;
    };
    // Bisection between an inside point and an outside point.
    auto refine = [&](double inside, double outside) {
        while (std::abs(outside - inside) > scan.edge_tolerance_nm) {
            const double mid = 0.5 * (inside + outside);
            (reflectance(mid) >= scan.threshold ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    };

    std::size_t lo = best, hi = best;
    while (lo > 0 && resp[lo - 1].R >= scan.threshold) --lo;
    while (hi + 1 < n && resp[hi + 1].R >= scan.threshold) ++hi;

    WavelengthInterval band{grid[lo], grid[hi]};
    if (lo > 0) band.lower_nm = refine(grid[lo], grid[lo - 1]);
    if (hi + 1 < n) band.upper_nm = refine(grid[hi], grid[hi + 1]);
    return band;
}

double finesse_from_mirrors(double R1, double R2, double round_trip_intensity_loss) {
    if (!(R1 > 0.0 && R1 < 1.0) || !(R2 > 0.0 && R2 < 1.0))
        throw InputDomainError("mirror reflectivities must lie in (0, 1)");
    if (!(round_trip_intensity_loss >= 0.0 && round_trip_intensity_loss < 1.0))
        throw InputDomainError("round-trip loss must lie in [0, 1)");
    const double rho = std::sqrt(R1 * R2 * (1.0 - round_trip_intensity_loss));
    if (rho >= 1.0) throw InputDomainError("round-trip amplitude factor must be below 1");
    return constants::pi * std::sqrt(rho) / (1.0 - rho);
}

std::vector<StackResponse> sweep(const LayerStack& stack, std::span<const double> wavelengths_nm,
                                 double angle_rad, Polarization polarization) {
    stack.validate();
    for (double wl : wavelengths_nm) check_query({wl, angle_rad, polarization});
    std::vector<StackResponse> out(wavelengths_nm.size());
    const auto n = static_cast<std::ptrdiff_t>(wavelengths_nm.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            stack_response(stack, {wavelengths_nm[static_cast<std::size_t>(i)], angle_rad, polarization});
    return out;
}

}  // namespace hcav::tmm
