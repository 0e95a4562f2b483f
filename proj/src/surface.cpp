#include "hemicav/surface.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>

#include "hemicav/constants.hpp"
#include "hemicav/error.hpp"

namespace hcav::surface {

using constants::pi;

bool HeightMap::complete() const {
    return std::all_of(valid.begin(), valid.end(), [](std::uint8_t v) { return v != 0; });
}

void HeightMap::validate() const {
    if (nx <= 0 || ny <= 0) throw InputDomainError("height map must have positive dimensions");
    if (!(pitch_um > 0.0) || !std::isfinite(pitch_um)) throw InputDomainError("pixel pitch must be positive");
    const auto n = static_cast<std::size_t>(nx) * ny;
    if (heights_nm.size() != n) throw InputDomainError("height map size does not match its dimensions");
    if (!valid.empty() && valid.size() != n) throw InputDomainError("valid mask size does not match the map");
    for (std::size_t i = 0; i < n; ++i)
        if ((valid.empty() || valid[i]) && !std::isfinite(heights_nm[i]))
            throw InputDomainError("height map holds a non-finite valid pixel");
}

const char* to_string(Window w) { return w == Window::Hann ? "hann" : "none"; }

Window window_from_string(const std::string& name) {
    if (name == "hann") return Window::Hann;
    if (name == "none") return Window::None;
    throw InputDomainError("unknown window '" + name + "' (expected hann or none)");
}

HeightMap detrend(const HeightMap& map) {
    map.validate();
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            if (!map.is_valid(ix, iy)) continue;
            const Eigen::Vector3d row(1.0, ix * map.pitch_um, iy * map.pitch_um);
            ata += row * row.transpose();
            atb += row * map.at(ix, iy);
        }
    const Eigen::Vector3d plane = ata.ldlt().solve(atb);
    HeightMap out = map;
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            auto& h = out.heights_nm[static_cast<std::size_t>(iy) * map.nx + ix];
            h = map.is_valid(ix, iy) ? h - (plane[0] + plane[1] * ix * map.pitch_um + plane[2] * iy * map.pitch_um) : 0.0;
        }
    return out;
}

PSDCurve compute_psd(const HeightMap& map, Window window) {
    map.validate();
    if (!map.complete()) throw InputDomainError("PSD needs a complete grid without masked pixels");
    if (map.nx < 16 || map.ny < 16) throw InputDomainError("PSD needs at least 16 x 16 pixels");
    const HeightMap flat = detrend(map);
    const int nx = map.nx, ny = map.ny;
    const double n = static_cast<double>(nx) * ny;

    PSDCurve out;
    out.window = window;
    double variance = 0.0;
    for (double h : flat.heights_nm) variance += h * h;
    out.variance_nm2 = variance / n;

    auto hann = [](int i, int len) { return 0.5 * (1.0 - std::cos(2.0 * pi * i / len)); };
    double* in = static_cast<double*>(fftw_malloc(sizeof(double) * nx * ny));
    const int ncx = nx / 2 + 1;
    auto* spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncx * ny));
    fftw_plan plan = fftw_plan_dft_r2c_2d(ny, nx, in, spec, FFTW_ESTIMATE);
    double wsum = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double w = window == Window::Hann ? hann(ix, nx) * hann(iy, ny) : 1.0;
            wsum += w * w;
            in[static_cast<std::size_t>(iy) * nx + ix] = flat.at(ix, iy) * w;
        }
    out.window_power = wsum / n;
    fftw_execute(plan);

    const double dx_mm = map.pitch_um * 1e-3;
    const double dfx = 1.0 / (nx * dx_mm);
    const double dfy = 1.0 / (ny * dx_mm);
    const double df = std::max(dfx, dfy);
    out.bin_width_per_mm = df;
    const double fmax = std::hypot(0.5 * nx * dfx, 0.5 * ny * dfy);
    const auto bins = static_cast<std::size_t>(std::lround(fmax / df)) + 1;
    std::vector<double> power(bins + 1, 0.0);
    const double norm = 1.0 / (n * n * out.window_power);
    for (int ky = 0; ky < ny; ++ky) {
        const int sky = ky <= ny / 2 ? ky : ky - ny;
        for (int kx = 0; kx < ncx; ++kx) {
            const double weight = (kx == 0 || (nx % 2 == 0 && kx == nx / 2)) ? 1.0 : 2.0;
            const double f = std::hypot(kx * dfx, sky * dfy);
            const auto b = static_cast<std::size_t>(std::lround(f / df));
            if (b == 0) continue;
            const auto& c = spec[static_cast<std::size_t>(ky) * ncx + kx];
            power[b] += weight * (c[0] * c[0] + c[1] * c[1]) * norm;
        }
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(spec);

    std::size_t last = power.size() - 1;
    while (last > 1 && power[last] == 0.0) --last;
    for (std::size_t b = 1; b <= last; ++b) {
        const double f = b * df;
        out.frequency_per_mm.push_back(f);
        out.psd_nm2_mm2.push_back(power[b] / (2.0 * pi * f * df));
    }
    return out;
}

double rms_in_band(const PSDCurve& psd, double f_low, double f_high) {
    if (psd.frequency_per_mm.size() != psd.psd_nm2_mm2.size() || psd.frequency_per_mm.empty())
        throw InputDomainError("malformed PSD curve");
    if (!(f_high > f_low)) throw InputDomainError("empty frequency band");
    const double slack = 1e-9 * psd.frequency_per_mm.back();
    if (f_low < psd.frequency_per_mm.front() - slack || f_high > psd.frequency_per_mm.back() + slack)
        throw InputDomainError("band extends beyond the PSD support");
    double sum = 0.0;
    int count = 0;
    double prev_f = 0.0, prev_v = 0.0;
    for (std::size_t i = 0; i < psd.frequency_per_mm.size(); ++i) {
        const double f = psd.frequency_per_mm[i];
        if (f < f_low - slack || f > f_high + slack) continue;
        const double v = 2.0 * pi * f * psd.psd_nm2_mm2[i];
        if (count > 0) sum += 0.5 * (v + prev_v) * (f - prev_f);
        prev_f = f;
        prev_v = v;
        ++count;
    }
    if (count < 2) throw InputDomainError("band holds fewer than two PSD samples");
    return std::sqrt(sum);
}

SphereFit fit_sphere(const HeightMap& map, double cx, double cy, double diameter) {
    map.validate();
    if (!(diameter > 0.0)) throw InputDomainError("fit region diameter must be positive");
    const double radius = 0.5 * diameter;
    const double xmax = (map.nx - 1) * map.pitch_um, ymax = (map.ny - 1) * map.pitch_um;
    if (cx - radius < 0.0 || cy - radius < 0.0 || cx + radius > xmax || cy + radius > ymax)
        throw InputDomainError("fit region extends beyond the map");

    std::vector<Eigen::Vector3d> pts;
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            const double x = ix * map.pitch_um - cx, y = iy * map.pitch_um - cy;
            if (x * x + y * y > radius * radius || !map.is_valid(ix, iy)) continue;
            pts.emplace_back(x, y, map.at(ix, iy) * 1e-3);
        }
    if (pts.size() < 100) throw InputDomainError("fit region holds fewer than 100 pixels");
    const auto np = static_cast<Eigen::Index>(pts.size());
    double z0 = 0.0;
    for (const auto& p : pts) z0 += p.z();
    z0 /= static_cast<double>(np);

    // x^2 + y^2 + z^2 + D x + E y + F z + G = 0
    Eigen::MatrixXd a(np, 4);
    Eigen::VectorXd b(np);
    for (Eigen::Index i = 0; i < np; ++i) {
        const Eigen::Vector3d p(pts[i].x(), pts[i].y(), pts[i].z() - z0);
        a.row(i) << p.x(), p.y(), p.z(), 1.0;
        b[i] = -p.squaredNorm();
    }
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4) throw FitError("fit region is flat: sphere radius is infinite", inf);
    const Eigen::Vector4d coef = qr.solve(b);
    Eigen::Vector4d p(-0.5 * coef[0], -0.5 * coef[1], -0.5 * coef[2], 0.0);
    const double r2 = p.head<3>().squaredNorm() - coef[3];
    if (!(r2 > 0.0)) throw FitError("fit region is flat: sphere radius is infinite", inf);
    p[3] = std::sqrt(r2);
    if (p[3] > 1e4 * diameter) throw FitError("fit region is flat: sphere radius is infinite", inf);

    const bool concave = p[2] > 0.0;
    const double s = concave ? 1.0 : -1.0;
    auto residuals = [&](const Eigen::Vector4d& q, Eigen::MatrixXd* jac) {
        Eigen::VectorXd r(np);
        for (Eigen::Index i = 0; i < np; ++i) {
            const double dx = pts[i].x() - q[0], dy = pts[i].y() - q[1];
            const double root2 = q[3] * q[3] - dx * dx - dy * dy;
            if (!(root2 > 0.0)) return Eigen::VectorXd();
            const double root = std::sqrt(root2);
            r[i] = (pts[i].z() - z0) - (q[2] - s * root);
            if (jac) jac->row(i) << -s * dx / root, -s * dy / root, 1.0, -s * q[3] / root;
        }
        return r;
    };
    Eigen::MatrixXd jac(np, 4);
    const Eigen::VectorXd r0 = residuals(p, &jac);
    if (r0.size() == np) {
        const Eigen::Vector4d delta = jac.colPivHouseholderQr().solve(r0);
        const Eigen::Vector4d trial = p + delta;
        const Eigen::VectorXd r1 = residuals(trial, nullptr);
        if (r1.size() == np && r1.squaredNorm() < r0.squaredNorm()) p = trial;
    }
    const Eigen::VectorXd res = residuals(p, nullptr);
    if (res.size() != np) throw FitError("sphere does not cover the fit region", p[3]);

    SphereFit out;
    out.radius_um = p[3];
    out.center_x_um = p[0] + cx;
    out.center_y_um = p[1] + cy;
    out.center_z_um = p[2] + z0;
    out.concave = concave;
    out.rms_residual_nm = std::sqrt(res.squaredNorm() / static_cast<double>(np)) * 1e3;
    out.max_abs_residual_nm = res.cwiseAbs().maxCoeff() * 1e3;
    out.fit_region_diameter_um = diameter;
    out.points = static_cast<int>(np);
    return out;
}

ScatterEstimate scatter_budget(double sigma_nm, double wavelength_nm, std::span<const double> transmissions) {
    if (!(sigma_nm >= 0.0)) throw InputDomainError("roughness must be >= 0");
    if (!(wavelength_nm > 0.0)) throw InputDomainError("wavelength must be positive");
    if (transmissions.empty()) throw InputDomainError("at least one mirror transmission is required");
    double loss = 0.0;
    for (double t : transmissions) {
        if (!(t > 0.0 && t < 1.0)) throw InputDomainError("mirror transmissions must lie in (0, 1)");
        loss += t;
    }
    ScatterEstimate out;
    out.rms_roughness_nm = sigma_nm;
    const double x = 4.0 * pi * sigma_nm / wavelength_nm;
    out.total_integrated_scatter = x * x;
    out.per_bounce_loss = out.total_integrated_scatter;
    loss += out.total_integrated_scatter * static_cast<double>(transmissions.size());
    out.finesse_ceiling = 2.0 * pi / loss;
    return out;
}

}  // namespace hcav::surface
