#include <cmath>
#include <random>

#include "doctest.h"
#include "hemicav/cqed.hpp"
#include "hemicav/error.hpp"

using namespace hcav;

namespace {

// SI constants written out independently of the library.
constexpr double h = 6.62607015e-34;
constexpr double hbar = h / (2.0 * M_PI);
constexpr double e = 1.602176634e-19;
constexpr double eps0 = 8.8541878128e-12;
constexpr double c = 299792458.0;
constexpr double debye = 3.33564e-30;

double coupling_oracle(double d_debye, double wl_nm, double volume_um3) {
    const double omega = 2.0 * M_PI * c / (wl_nm * 1e-9);
    const double g = d_debye * debye * std::sqrt(hbar * omega / (2.0 * eps0 * volume_um3 * 1e-18));
    return g / e * 1e6;
}

double kappa_oracle(double length_um, double refl) {
    const double fsr_hz = c / (2.0 * length_um * 1e-6);
    const double finesse = M_PI * std::sqrt(refl) / (1.0 - refl);
    return h * fsr_hz / finesse / 2.0 / e * 1e6;
}

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace

TEST_CASE("coupling energy") {
    const double v = M_PI * 0.25 * 50.0 / 4.0;
    cqed::Emitter em{60.0, 750.0, 15.0, 0.0};
    CHECK(cqed::coupling_energy(em, v) == doctest::Approx(coupling_oracle(60.0, 750.0, v)).epsilon(1e-10));
    em.dipole_moment_debye = 100.0;
    CHECK(cqed::coupling_energy(em, v) == doctest::Approx(coupling_oracle(100.0, 750.0, v)).epsilon(1e-10));
    // g scales as V^-1/2.
    CHECK(cqed::coupling_energy(em, 4.0 * v) == doctest::Approx(0.5 * cqed::coupling_energy(em, v)));
    CHECK_THROWS_AS(cqed::coupling_energy(em, 0.0), InputDomainError);
}

TEST_CASE("cavity linewidth") {
    const auto loss = cqed::cavity_linewidth(50.0, 0.996);
    CHECK(loss.kappa_ueV == doctest::Approx(kappa_oracle(50.0, 0.996)).epsilon(1e-10));
    CHECK(loss.free_spectral_range_thz == doctest::Approx(c / 100e-6 * 1e-12));
    CHECK_THROWS_AS(cqed::cavity_linewidth(50.0, 1.0), InputDomainError);
}

TEST_CASE("strong coupling verdict") {
    const auto r = cqed::strong_coupling(49.0, 15.0, 8.0);
    CHECK(r.strong);
    CHECK(r.splitting_ueV == 98.0);
    CHECK(r.margin_ueV == doctest::Approx(75.0));
    CHECK_FALSE(cqed::strong_coupling(5.0, 15.0, 8.0).strong);
    CHECK_FALSE(cqed::strong_coupling(11.5, 15.0, 8.0).strong);  // equality is not strong
}

TEST_CASE("transmission spectrum") {
    const auto loss = cqed::cavity_linewidth(50.0, 0.996);
    const auto g = grid(-40.0, 40.0, 161);
    const auto empty = cqed::transmission_spectrum(loss, std::nullopt, 0.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k = loss.kappa_ueV;
        CHECK(empty.transmission[i] == doctest::Approx(k * k / (g[i] * g[i] + k * k)).epsilon(1e-12));
    }
    // Strongly coupled emitter: a dip at zero detuning and two peaks near +-g.
    const cqed::Emitter em{60.0, 750.0, 15.0, 0.0};
    const auto wide = grid(-150.0, 150.0, 3001);
    const auto s = cqed::transmission_spectrum(cqed::cavity_linewidth(50.0, 0.996), em, 49.0, wide);
    const auto pair = cqed::find_peak_pair(s);
    CHECK(pair.central_dip);
    CHECK(pair.lower_center == doctest::Approx(-pair.upper_center).epsilon(1e-6));
    CHECK(pair.separation > 90.0);
    CHECK(pair.separation < 105.0);
}

TEST_CASE("round trip factor") {
    for (double f : {10.0, 50.0, 627.0, 6000.0}) {
        const double rho = cqed::round_trip_factor_from_finesse(f);
        CHECK(M_PI * std::sqrt(rho) / (1.0 - rho) == doctest::Approx(f).epsilon(1e-10));
    }
    CHECK_THROWS_AS(cqed::round_trip_factor_from_finesse(0.0), InputDomainError);
}

TEST_CASE("effective finesse under extra absorption") {
    CHECK(cqed::effective_finesse(200.0, 0.0) == doctest::Approx(200.0));
    const double rho = cqed::round_trip_factor_from_finesse(200.0) * (1.0 - 0.01);
    CHECK(cqed::effective_finesse(200.0, 0.01) == doctest::Approx(M_PI * std::sqrt(rho) / (1.0 - rho)));
    CHECK(cqed::effective_finesse(200.0, 0.02) < cqed::effective_finesse(200.0, 0.01));
}

TEST_CASE("finesse round trip through an Airy spectrum") {
    for (double f : {50.0, 200.0, 600.0}) {
        const double fsr = 5.0;
        const auto g = grid(0.0, 17.3, 400001);
        const auto s = cqed::airy_spectrum(fsr, f, g);
        CHECK(cqed::extract_finesse(s) == doctest::Approx(f).epsilon(0.02));
    }
}

TEST_CASE("finesse extraction rejects unresolved spectra") {
    const auto g = grid(-5.0, 6.0, 4001);
    cqed::TransmissionSpectrum blend{g, {}}, flat{g, std::vector<double>(g.size(), 0.3)};
    for (double x : g) blend.transmission.push_back(1.0 / (1.0 + std::pow(x / 0.6, 2)) + 1.0 / (1.0 + std::pow((x - 1.0) / 0.6, 2)));
    CHECK_THROWS_AS(cqed::extract_finesse(blend), AnalysisError);
    CHECK_THROWS_AS(cqed::extract_finesse(flat), AnalysisError);
    const auto one = grid(0.0, 4.0, 1001);  // a single peak has no spacing
    CHECK_THROWS_AS(cqed::extract_finesse(cqed::airy_spectrum(5.0, 50.0, one)), AnalysisError);
}

TEST_CASE("normal-mode fit recovers the pole splitting") {
    const double gc = 49.0, gam = 15.0;
    const auto loss = cqed::cavity_linewidth(50.0, 0.996);
    const double k = loss.kappa_ueV;
    const auto g = grid(-200.0, 200.0, 2001);
    const auto s = cqed::transmission_spectrum(loss, cqed::Emitter{60.0, 750.0, gam, 0.0}, gc, g);
    const auto fit = cqed::fit_normal_modes(s);
    const double oracle = 2.0 * std::sqrt(gc * gc - (gam - k) * (gam - k) / 4.0);
    CHECK(fit.normal_mode_splitting_ueV == doctest::Approx(oracle).epsilon(1e-3));
    CHECK(fit.coupling_ueV == doctest::Approx(gc).epsilon(1e-3));
    CHECK(fit.kappa_ueV == doctest::Approx(k).epsilon(1e-2));
    CHECK(fit.gamma_ueV == doctest::Approx(gam).epsilon(1e-2));
}

TEST_CASE("normal-mode fit tolerates noise") {
    const auto loss = cqed::cavity_linewidth(50.0, 0.996);
    const auto g = grid(-200.0, 200.0, 2001);
    auto s = cqed::transmission_spectrum(loss, cqed::Emitter{60.0, 750.0, 15.0, 0.0}, 49.0, g);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 0.002);
    for (auto& t : s.transmission) t += noise(rng);
    const auto fit = cqed::fit_normal_modes(s);
    const double oracle = 2.0 * std::sqrt(49.0 * 49.0 - std::pow(15.0 - loss.kappa_ueV, 2) / 4.0);
    CHECK(fit.normal_mode_splitting_ueV == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("line shape classification") {
    const auto g = grid(-10.0, 10.0, 801);
    cqed::TransmissionSpectrum lor{g, {}}, gau{g, {}};
    for (double x : g) {
        lor.transmission.push_back(0.1 + 1.0 / (1.0 + std::pow((x - 0.4) / 1.3, 2)));
        gau.transmission.push_back(0.1 + std::exp(-std::log(2.0) * std::pow((x + 0.2) / 1.3, 2)));
    }
    const auto a = cqed::classify_line(lor);
    CHECK(a.shape == cqed::LineShape::Lorentzian);
    CHECK(a.center == doctest::Approx(0.4).epsilon(1e-4));
    CHECK(a.width == doctest::Approx(1.3).epsilon(1e-4));
    const auto b = cqed::classify_line(gau);
    CHECK(b.shape == cqed::LineShape::Gaussian);
    CHECK(b.width == doctest::Approx(1.3).epsilon(1e-4));
    CHECK(std::string(cqed::to_string(cqed::LineShape::Ambiguous)) == "ambiguous");
}
