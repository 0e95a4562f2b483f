#include <cmath>
#include <random>

#include "doctest.h"
#include "hemicav/error.hpp"
#include "hemicav/surface.hpp"

using namespace hcav;

namespace {

// White noise smoothed by a periodic Gaussian kernel, so the spectrum is
// concentrated well below Nyquist.
surface::HeightMap rough_surface(int n, double pitch_um, double corr_px, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> a(static_cast<std::size_t>(n) * n), b(a.size());
    for (auto& v : a) v = normal(rng);
    const int half = static_cast<int>(std::ceil(4 * corr_px));
    std::vector<double> k(2 * half + 1);
    for (int j = -half; j <= half; ++j) k[j + half] = std::exp(-0.5 * j * j / (corr_px * corr_px));
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double s = 0.0;
            for (int j = -half; j <= half; ++j) s += k[j + half] * a[y * n + (x + j + n) % n];
            b[y * n + x] = s;
        }
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double s = 0.0;
            for (int j = -half; j <= half; ++j) s += k[j + half] * b[((y + j + n) % n) * n + x];
            a[y * n + x] = s;
        }
    return {n, n, pitch_um, a, {}};
}

double variance(const surface::HeightMap& m) {
    const auto d = surface::detrend(m);
    double s = 0.0;
    for (double v : d.heights_nm) s += v * v;
    return s / static_cast<double>(d.heights_nm.size());
}

double binned_power(const surface::PSDCurve& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.frequency_per_mm.size(); ++i)
        s += 2.0 * M_PI * p.frequency_per_mm[i] * p.psd_nm2_mm2[i] * p.bin_width_per_mm;
    return s;
}

surface::HeightMap sphere_cap(double radius_um, double cx, double cy, int n, double pitch, double sign = 1.0) {
    surface::HeightMap m{n, n, pitch, std::vector<double>(static_cast<std::size_t>(n) * n), {}};
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double x = ix * pitch - cx, y = iy * pitch - cy;
            // Concave: the surface rises away from the vertex towards a center above it.
            m.heights_nm[static_cast<std::size_t>(iy) * n + ix] =
                sign * 1e3 * (radius_um - std::sqrt(radius_um * radius_um - x * x - y * y));
        }
    return m;
}

}  // namespace

TEST_CASE("detrend removes mean and tilt") {
    auto m = rough_surface(64, 0.5, 2.0, 1);
    const auto base = surface::detrend(m);
    for (int iy = 0; iy < 64; ++iy)
        for (int ix = 0; ix < 64; ++ix) m.heights_nm[iy * 64 + ix] += 7.0 + 0.3 * ix - 0.2 * iy;
    const auto tilted = surface::detrend(m);
    for (std::size_t i = 0; i < base.heights_nm.size(); ++i)
        CHECK(tilted.heights_nm[i] == doctest::Approx(base.heights_nm[i]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("Parseval without a window is exact") {
    const auto m = rough_surface(128, 0.4, 1.0, 2);
    const auto p = surface::compute_psd(m, surface::Window::None);
    CHECK(p.window_power == 1.0);
    CHECK(binned_power(p) == doctest::Approx(variance(m)).epsilon(1e-10));
    CHECK(p.variance_nm2 == doctest::Approx(variance(m)).epsilon(1e-12));
}

TEST_CASE("Hann PSD integrates to the window-weighted variance") {
    // Per realization the compensated Hann estimate measures sum(w^2 h^2) / sum(w^2).
    const int n = 256;
    const auto m = rough_surface(n, 0.25, 1.5, 3);
    const auto p = surface::compute_psd(m, surface::Window::Hann);
    CHECK(p.window_power == doctest::Approx(9.0 / 64.0).epsilon(1e-2));
    const auto d = surface::detrend(m);
    double sw = 0.0, swh = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double w = (0.5 - 0.5 * std::cos(2.0 * M_PI * x / n)) * (0.5 - 0.5 * std::cos(2.0 * M_PI * y / n));
            sw += w * w;
            swh += w * w * d.heights_nm[y * n + x] * d.heights_nm[y * n + x];
        }
    // The uniformly weighted plane fit leaves a small weighted mean in the skipped DC bin.
    CHECK(binned_power(p) == doctest::Approx(swh / sw).epsilon(1e-3));
}

TEST_CASE("Parseval with the Hann window over an ensemble") {
    // A single realization scatters by the sampling error of a weighted
    // variance; the ensemble mean must match within 1%.
    double ratio = 0.0;
    const int members = 8;
    for (int seed = 0; seed < members; ++seed) {
        const auto m = rough_surface(512, 0.25, 1.0, 100 + seed);
        const auto p = surface::compute_psd(m, surface::Window::Hann);
        const double band = surface::rms_in_band(p, p.frequency_per_mm.front(), p.frequency_per_mm.back());
        ratio += band * band / variance(m) / members;
    }
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("PSD is invariant under piston and tilt") {
    auto m = rough_surface(64, 0.5, 2.0, 4);
    const auto a = surface::compute_psd(m);
    for (int iy = 0; iy < 64; ++iy)
        for (int ix = 0; ix < 64; ++ix) m.heights_nm[iy * 64 + ix] += -40.0 + 1.5 * ix + 0.7 * iy;
    const auto b = surface::compute_psd(m);
    REQUIRE(a.psd_nm2_mm2.size() == b.psd_nm2_mm2.size());
    double peak = 0.0;
    for (double v : a.psd_nm2_mm2) peak = std::max(peak, v);
    for (std::size_t i = 0; i < a.psd_nm2_mm2.size(); ++i)
        CHECK(std::abs(a.psd_nm2_mm2[i] - b.psd_nm2_mm2[i]) <= 1e-10 * peak);
}

TEST_CASE("a sinusoid lands in its frequency bin") {
    const int n = 128;
    const double pitch = 0.5;                      // um
    const double f_mm = 10.0 / (n * pitch * 1e-3);  // ten periods across the map
    surface::HeightMap m{n, n, pitch, std::vector<double>(n * n), {}};
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) m.heights_nm[iy * n + ix] = 2.0 * std::sin(2.0 * M_PI * f_mm * ix * pitch * 1e-3);
    const auto p = surface::compute_psd(m, surface::Window::None);
    const auto it = std::max_element(p.psd_nm2_mm2.begin(), p.psd_nm2_mm2.end());
    CHECK(p.frequency_per_mm[it - p.psd_nm2_mm2.begin()] == doctest::Approx(f_mm));
    const double rms = surface::rms_in_band(p, f_mm - 2.0 * p.bin_width_per_mm, f_mm + 2.0 * p.bin_width_per_mm);
    CHECK(rms * rms == doctest::Approx(variance(m)).epsilon(0.35));  // trapezoid over a one-bin spike
    CHECK(binned_power(p) == doctest::Approx(variance(m)).epsilon(1e-10));
    CHECK(variance(m) == doctest::Approx(2.0).epsilon(0.02));  // the plane fit absorbs a little
}

TEST_CASE("band RMS input checks") {
    const auto p = surface::compute_psd(rough_surface(32, 1.0, 1.0, 5));
    CHECK_THROWS_AS(surface::rms_in_band(p, 10.0, 5.0), InputDomainError);
    CHECK_THROWS_AS(surface::rms_in_band(p, 1e6, 2e6), InputDomainError);
    surface::HeightMap tiny{8, 8, 1.0, std::vector<double>(64, 0.0), {}};
    CHECK_THROWS_AS(surface::compute_psd(tiny), InputDomainError);
}

TEST_CASE("sphere fit recovers a 50 um sphere") {
    const auto m = sphere_cap(50.0, 10.0, 10.0, 201, 0.1);
    const auto f = surface::fit_sphere(m, 10.0, 10.0, 15.0);
    CHECK(f.radius_um == doctest::Approx(50.0).epsilon(1e-3));
    CHECK(f.rms_residual_nm < 0.01);
    CHECK(f.concave);
    CHECK(f.center_x_um == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(f.center_y_um == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(f.points > 10000);
}

TEST_CASE("sphere fit is equivariant") {
    const auto a = surface::fit_sphere(sphere_cap(50.0, 10.0, 10.0, 201, 0.1), 10.0, 10.0, 12.0);
    const auto b = surface::fit_sphere(sphere_cap(50.0, 12.5, 9.0, 201, 0.1), 12.5, 9.0, 12.0);
    CHECK(b.center_x_um - a.center_x_um == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(b.center_y_um - a.center_y_um == doctest::Approx(-1.0).epsilon(1e-6));
    const auto c = surface::fit_sphere(sphere_cap(50.0, 10.0, 10.0, 201, 0.1, -1.0), 10.0, 10.0, 12.0);
    CHECK_FALSE(c.concave);
    CHECK(c.radius_um == doctest::Approx(a.radius_um).epsilon(1e-9));
}

TEST_CASE("sphere fit rejects flat data and ignores masked pixels") {
    surface::HeightMap plane{64, 64, 0.1, std::vector<double>(64 * 64), {}};
    for (int iy = 0; iy < 64; ++iy)
        for (int ix = 0; ix < 64; ++ix) plane.heights_nm[iy * 64 + ix] = 0.5 * ix + 0.1 * iy;
    CHECK_THROWS_AS(surface::fit_sphere(plane, 3.2, 3.2, 5.0), FitError);

    auto m = sphere_cap(50.0, 10.0, 10.0, 201, 0.1);
    m.valid.assign(m.heights_nm.size(), 1);
    for (int i = 0; i < 200; ++i) {
        m.heights_nm[100 * 201 + i] = 1e6;  // a bad row hidden by the mask
        m.valid[100 * 201 + i] = 0;
    }
    const auto f = surface::fit_sphere(m, 10.0, 10.0, 15.0);
    CHECK(f.radius_um == doctest::Approx(50.0).epsilon(1e-3));
}

TEST_CASE("scatter budget") {
    const std::vector<double> t{1e-4, 1e-4};
    const auto s = surface::scatter_budget(1.0, 750.0, t);
    const double tis = std::pow(4.0 * M_PI * 1.0 / 750.0, 2);
    CHECK(s.total_integrated_scatter == doctest::Approx(tis).epsilon(1e-14));
    CHECK(s.total_integrated_scatter == doctest::Approx(2.81e-4).epsilon(2e-3));
    CHECK(s.finesse_ceiling == doctest::Approx(2.0 * M_PI / (2e-4 + 2.0 * tis)).epsilon(1e-14));
    CHECK(surface::scatter_budget(2.0, 750.0, t).finesse_ceiling < s.finesse_ceiling);
    const std::vector<double> more{2e-4, 1e-4};
    CHECK(surface::scatter_budget(1.0, 750.0, more).finesse_ceiling < s.finesse_ceiling);
    CHECK_THROWS_AS(surface::scatter_budget(-1.0, 750.0, t), InputDomainError);
}
