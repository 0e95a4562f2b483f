#include "hemicav/fdtd/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "hemicav/constants.hpp"
#include "hemicav/error.hpp"

namespace hcav::fdtd {

namespace {

using cplx = std::complex<double>;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using fftw_buffer = std::unique_ptr<T[], FftwFree>;

// Forward real transform of `x` zero-padded to length m; returns m/2 + 1 bins.
std::vector<cplx> real_fft(const std::vector<double>& x, std::size_t m) {
    fftw_buffer<double> in(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
    fftw_buffer<fftw_complex> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (m / 2 + 1))));
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE);
    std::fill(in.get(), in.get() + m, 0.0);
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<cplx> result(m / 2 + 1);
    for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
    return result;
}

std::vector<cplx> inverse_fft(const std::vector<cplx>& spectrum) {
    const std::size_t m = spectrum.size();
    fftw_buffer<fftw_complex> buf(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    for (std::size_t k = 0; k < m; ++k) {
        buf[k][0] = spectrum[k].real();
        buf[k][1] = spectrum[k].imag();
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<cplx> result(m);
    for (std::size_t k = 0; k < m; ++k) result[k] = cplx{buf[k][0], buf[k][1]} / static_cast<double>(m);
    return result;
}

// Decay rate of the analytic envelope in a Gaussian band around f.
double envelope_quality(const std::vector<double>& x, double dt_fs, double f_thz, double half_band_thz) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n);
    const auto spectrum = real_fft(x, m);
    const double df = 1e3 / (static_cast<double>(m) * dt_fs);
    std::vector<cplx> analytic(m, cplx{});
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        const double u = (k * df - f_thz) / half_band_thz;
        analytic[k] = 2.0 * spectrum[k] * std::exp(-u * u);
    }
    const auto z = inverse_fft(analytic);

    const double duration = n * dt_fs;
    const double skip = std::min(3.0 / (constants::pi * half_band_thz) * 1e3, 0.25 * duration);
    double env_max = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i * dt_fs;
        if (t < skip || t > duration - skip) continue;
        const double e = std::abs(z[i]);
        env_max = std::max(env_max, e);
        pts.emplace_back(t, e);
    }
    double st = 0, sy = 0, stt = 0, sty = 0;
    int count = 0;
    double t_first = 0.0, t_last = 0.0;
    for (auto [t, e] : pts) {
        if (!(e > 1e-8 * env_max)) continue;
        const double y = std::log(e);
        if (count == 0) t_first = t;
        t_last = t;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++count;
    }
    if (count < 8) return std::numeric_limits<double>::quiet_NaN();
    const double slope = (count * sty - st * sy) / (count * stt - st * st);
    const double alpha = -slope;  // per fs
    if (!(alpha > 0.0) || alpha * (t_last - t_first) < 1e-6) return std::numeric_limits<double>::infinity();
    return constants::pi * f_thz * 1e-3 / alpha;
}

}  // namespace

double resolution_limit_thz(double duration_fs) { return 2.0 / duration_fs * 1e3; }

std::vector<Resonance> resonances(std::span<const double> samples, double dt_fs, const ResonanceOptions& options) {
    const std::size_t n = samples.size();
    if (n < 16) throw AnalysisError("record too short for spectral analysis");
    if (!(dt_fs > 0.0)) throw InputDomainError("sampling step must be positive");
    double mean = 0.0;
    for (double v : samples) {
        if (!std::isfinite(v)) throw AnalysisError("record contains non-finite samples");
        mean += v;
    }
    mean /= static_cast<double>(n);
    std::vector<double> x(n), xw(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = samples[i] - mean;
        const double w = 0.5 * (1.0 - std::cos(2.0 * constants::pi * i / (n - 1)));
        xw[i] = x[i] * w;
    }

    const std::size_t m = next_pow2(8 * n);
    const auto spectrum = real_fft(xw, m);
    const double df = 1e3 / (static_cast<double>(m) * dt_fs);
    std::vector<double> power(spectrum.size());
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spectrum[k]);

    const std::size_t kmin = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(options.min_thz / df)));
    const double kmax_f = std::min(options.max_thz / df, static_cast<double>(power.size() - 2));
    const std::size_t kmax = static_cast<std::size_t>(std::floor(kmax_f));
    if (kmax <= kmin + 2) throw AnalysisError("analysis band holds no spectral bins");

    std::vector<double> band(power.begin() + kmin, power.begin() + kmax + 1);
    std::nth_element(band.begin(), band.begin() + band.size() / 2, band.end());
    const double median = band[band.size() / 2];

    const double duration = n * dt_fs;
    const auto half = static_cast<std::ptrdiff_t>(std::floor(0.95 * resolution_limit_thz(duration) / df));
    std::vector<std::size_t> peaks;
    for (std::size_t k = kmin; k <= kmax; ++k) {
        if (!(power[k] >= power[k - 1] && power[k] > power[k + 1])) continue;
        const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(kmin), static_cast<std::ptrdiff_t>(k) - half));
        const std::size_t hi = std::min(kmax, k + static_cast<std::size_t>(half));
        if (*std::max_element(power.begin() + lo, power.begin() + hi + 1) > power[k]) continue;
        if (!(power[k] > options.noise_factor * median)) continue;
        peaks.push_back(k);
    }
    double strongest = 0.0;
    for (auto k : peaks) strongest = std::max(strongest, power[k]);
    std::erase_if(peaks, [&](std::size_t k) { return power[k] < options.dynamic_range * strongest; });
    if (peaks.empty()) throw AnalysisError("no spectral peak above the noise floor");

    std::vector<Resonance> out;
    for (auto k : peaks) {
        const double a = std::log(power[k - 1]), b = std::log(power[k]), c = std::log(power[k + 1]);
        const double denom = a - 2.0 * b + c;
        const double delta = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
        out.push_back({(k + delta) * df, 0.0, power[k]});
    }
    for (std::size_t j = 0; j < out.size(); ++j) {
        double gap = std::numeric_limits<double>::infinity();
        if (j > 0) gap = std::min(gap, out[j].frequency_thz - out[j - 1].frequency_thz);
        if (j + 1 < out.size()) gap = std::min(gap, out[j + 1].frequency_thz - out[j].frequency_thz);
        const double floor_band = 12.0 / (constants::pi * duration) * 1e3;
        const double band_width = std::max(floor_band, std::min(0.5 * gap, 0.05 * out[j].frequency_thz));
        out[j].quality_factor = envelope_quality(x, dt_fs, out[j].frequency_thz, band_width);
    }
    return out;
}

std::vector<Resonance> resonances(const ProbeRecord& record, const ResonanceOptions& options) {
    if (options.probe >= record.series.size()) throw InputDomainError("probe index out of range");
    const auto& s = record.series[options.probe];
    std::size_t first = 0;
    while (first < s.size() && (first + 1) * record.dt_fs <= record.source_end_fs) ++first;
    return resonances(std::span<const double>(s.data() + first, s.size() - first), record.dt_fs, options);
}

namespace {

void accumulate_energy(const Fields& f, const SimulationDomain& d, std::vector<double>& acc,
                       std::vector<double>& electric) {
    const double wc = d.azimuthal_order == 0 ? 1.0 : 0.5;
    const double ws = wc;
    const int nr = d.nr, nz = d.nz;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k) {
        for (int i = 0; i < nr; ++i) {
            if (d.is_pec(i, k)) continue;
            auto sq = [](double v) { return v * v; };
            const double eps = d.eps(i, k);
            const double er2 = 0.5 * (sq(f.er[f.at(i, k)]) + sq(f.er[f.at(i, k + 1)]));
            const double ez2 = 0.5 * (sq(f.ez[f.at(i, k)]) + sq(f.ez[f.at(i + 1, k)]));
            const double hp2 = sq(f.hp[f.at(i, k)]);
            double ep2, hr2;
            if (i == 0) {
                ep2 = 0.5 * (sq(f.ep[f.at(1, k)]) + sq(f.ep[f.at(1, k + 1)]));
                hr2 = sq(f.hr[f.at(1, k)]);
            } else {
                ep2 = 0.25 * (sq(f.ep[f.at(i, k)]) + sq(f.ep[f.at(i + 1, k)]) + sq(f.ep[f.at(i, k + 1)]) +
                              sq(f.ep[f.at(i + 1, k + 1)]));
                hr2 = 0.5 * (sq(f.hr[f.at(i, k)]) + sq(f.hr[f.at(i + 1, k)]));
            }
            const double hz2 = 0.5 * (sq(f.hz[f.at(i, k)]) + sq(f.hz[f.at(i, k + 1)]));
            const double a = eps * (er2 + ez2) + hp2;
            const double b = eps * ep2 + hr2 + hz2;
            acc[d.cell_index(i, k)] += 0.5 * (wc * a + ws * b);
            electric[d.cell_index(i, k)] += 0.5 * eps * (wc * (er2 + ez2) + ws * ep2);
        }
    }
}

}  // namespace

ModeProfile mode_profile(const SimulationDomain& domain, double resonance_thz, const SourceSpec& source,
                         double settle_cycles, const ProfileOptions& options) {
    if (!(resonance_thz > 0.0)) throw InputDomainError("resonance frequency must be positive");
    if (!(settle_cycles >= 0.0) || !(options.average_cycles > 0.0))
        throw InputDomainError("settle and averaging windows must be nonnegative and positive");
    SourceSpec src = source;
    src.center_thz = resonance_thz;
    src.bandwidth_thz = options.bandwidth_thz;

    Simulation sim(domain);
    sim.set_source(src);
    const GridPoint probe = src.kind == SourceKind::Point
                                ? locate(domain, src.component, src.r_um, src.z_um)
                                : locate(domain, Component::Er, 0.0, src.z_um);
    const Component probe_component = src.kind == SourceKind::Point ? src.component : Component::Er;

    const double dt_fs = sim.dt_fs();
    const double period_fs = 1e3 / resonance_thz;
    const long pulse_steps = static_cast<long>(std::ceil(src.end_fs() / dt_fs));
    const long settle_steps = static_cast<long>(std::ceil(settle_cycles * period_fs / dt_fs));
    const long average_steps = static_cast<long>(std::ceil(options.average_cycles * period_fs / dt_fs));

    sim.run(pulse_steps);
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(settle_steps + average_steps));
    for (long n = 0; n < settle_steps; ++n) {
        sim.step();
        trace.push_back(sim.sample(probe_component, probe));
    }
    std::vector<double> acc(static_cast<std::size_t>(domain.nr) * domain.nz, 0.0);
    std::vector<double> electric(acc.size(), 0.0);
    for (long n = 0; n < average_steps; ++n) {
        sim.step();
        trace.push_back(sim.sample(probe_component, probe));
        accumulate_energy(sim.fields(), domain, acc, electric);
    }

    ModeProfile out;
    out.resonance_frequency_thz = resonance_thz;
    out.nr = domain.nr;
    out.nz = domain.nz;
    out.cell_um = domain.cell_um;

    std::vector<Resonance> lines;
    try {
        lines = resonances(trace, dt_fs);
    } catch (const AnalysisError&) {
        throw AnalysisError("re-excitation left no field at the requested resonance");
    }
    const auto dominant = std::max_element(lines.begin(), lines.end(),
                                           [](const Resonance& a, const Resonance& b) { return a.power < b.power; });
    out.measured_frequency_thz = dominant->frequency_thz;
    out.quality_factor = dominant->quality_factor;
    const double tolerance = std::max(0.5 * options.bandwidth_thz, resolution_limit_thz(trace.size() * dt_fs));
    if (std::abs(out.measured_frequency_thz - resonance_thz) > tolerance)
        throw AnalysisError("unresolved resonance: dominant line sits away from the requested frequency");

    const double inv_steps = 1.0 / static_cast<double>(average_steps);
    for (auto& v : acc) v *= inv_steps;
    for (auto& v : electric) v *= inv_steps;
    out.energy_density = std::move(acc);
    out.electric_energy_density = std::move(electric);
    out.peak_energy_density = *std::max_element(out.energy_density.begin(), out.energy_density.end());
    if (!(out.peak_energy_density > 0.0)) throw AnalysisError("re-excitation left no field in the domain");

    const double h = domain.cell_um;
    double integral = 0.0;
    for (int k = 0; k < domain.nz; ++k)
        for (int i = 0; i < domain.nr; ++i)
            integral += out.energy_density[domain.cell_index(i, k)] * 2.0 * constants::pi * (i + 0.5) * h * h * h;
    out.effective_mode_volume_um3 = integral / out.peak_energy_density;

    // Transverse 1/e field-amplitude radius (1/e^2 in electric energy) on
    // the first row above the DBR.
    out.waist_row = std::min(domain.surface_row, domain.nz - 1);
    const auto& ue = out.electric_energy_density;
    const double u0 = ue[domain.cell_index(0, out.waist_row)];
    if (std::isfinite(domain.mirror_radius_um) && u0 > 0.0) {
        const double target = u0 * std::exp(-2.0);
        for (int i = 1; i < domain.nr; ++i) {
            const double u = ue[domain.cell_index(i, out.waist_row)];
            if (u < target) {
                const double up = ue[domain.cell_index(i - 1, out.waist_row)];
                const double r = (i - 0.5 + (up - target) / (up - u)) * h;
                if (r < 0.75 * (domain.nr - 1) * h) out.waist_radius_um = r;
                break;
            }
        }
    }

    const int first_layer_bottom = domain.layer_rows.size() > 1 ? domain.layer_rows[1] : domain.surface_row;
    const double wavelength_um = thz_per_frequency_unit / resonance_thz;
    const int top = std::min(domain.nz - 1, domain.surface_row + static_cast<int>(std::ceil(0.25 * wavelength_um / h)));
    int best = first_layer_bottom;
    for (int k = first_layer_bottom; k <= top; ++k)
        if (out.energy_density[domain.cell_index(0, k)] > out.energy_density[domain.cell_index(0, best)]) best = k;
    out.antinode_z_um = (best + 0.5) * h - domain.surface_z_um();
    out.antinode_relative = out.energy_density[domain.cell_index(0, best)] / out.peak_energy_density;
    return out;
}

}  // namespace hcav::fdtd
