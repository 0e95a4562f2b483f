#include <cmath>

#include "doctest.h"
#include "hemicav/coating.hpp"
#include "hemicav/error.hpp"

using namespace hcav;

namespace {

constexpr double deg = M_PI / 180.0;

// (HL)^N H TiO2/SiO2-class stack whose 95% band ends at `upper_nm`.
tmm::LayerStack pinned_stack(int pairs, double upper_nm) {
    const auto probe = tmm::quarter_wave_stack(2.3, 1.45, 1.5, 770.0, pairs, true, true);
    tmm::StopBandScan scan;
    scan.lower_nm = 450.0;
    const auto band = tmm::stop_band(probe, 0.0, tmm::Polarization::TE, scan);
    REQUIRE(band.has_value());
    return tmm::quarter_wave_stack(2.3, 1.45, 1.5, 770.0 * upper_nm / band->upper_nm, pairs, true, true);
}

}  // namespace

TEST_CASE("dimple geometry") {
    const auto g = coating::DimpleGeometry::from_depth(50.0, 10.0);
    CHECK(std::cos(g.opening_half_angle_deg * deg) == doctest::Approx(1.0 - 10.0 / 50.0));
    CHECK_THROWS_AS(coating::DimpleGeometry::from_depth(10.0, 20.0), InputDomainError);
}

TEST_CASE("thinning law") {
    coating::DepositionModel m{2.0};
    CHECK(m.thickness_factor(0.0) == 1.0);
    CHECK(m.thickness_factor(60.0 * deg) == doctest::Approx(0.25));
    coating::DepositionModel flat{0.0};
    CHECK(flat.thickness_factor(1.2) == 1.0);

    const auto base = tmm::quarter_wave_stack(2.3, 1.45, 1.5, 750.0, 2);
    const auto local = coating::local_stack({base, 1.1}, m, 30.0 * deg);
    CHECK(local.layers[0].thickness_nm == doctest::Approx(base.layers[0].thickness_nm * 1.1 * 0.75));
}

TEST_CASE("angle grid") {
    const auto g = coating::angle_grid(40.0 * deg, 0.5 * deg);
    CHECK(g.size() == 81);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(40.0 * deg));
    CHECK(coating::angle_grid(0.0, 0.1).size() == 1);
}

TEST_CASE("cutoff angle follows the band-scaling oracle") {
    // Thinning by cos(theta) shifts the band edge to upper * cos(theta); the
    // working wavelength leaves the band when that reaches it.
    const auto stack = pinned_stack(15, 808.0);
    const coating::DepositionModel m{1.0};
    const auto cut = coating::cutoff_angle({stack, 1.0}, m, 750.0, 0.95);
    REQUIRE(cut.has_value());
    CHECK(*cut / deg == doctest::Approx(std::acos(750.0 / 808.0) / deg).epsilon(0.002));

    // A uniform coating never leaves the band.
    CHECK_FALSE(coating::cutoff_angle({stack, 1.0}, coating::DepositionModel{0.0}, 750.0, 0.95).has_value());
    // Outside the band from the start.
    CHECK(coating::cutoff_angle({stack, 0.8}, m, 750.0, 0.95).value() == 0.0);
}

TEST_CASE("profile is monotone inside the cutoff") {
    const auto stack = pinned_stack(15, 808.0);
    const auto grid = coating::angle_grid(20.0 * deg, 1.0 * deg);
    const auto p = coating::reflectivity_profile({stack, 1.0}, coating::DepositionModel{1.0}, 750.0, grid);
    REQUIRE(p.size() == grid.size());
    for (const auto& pt : p) CHECK(pt.reflectance > 0.95);
}

TEST_CASE("optimizer succeeds exactly when the band ratio allows it") {
    // Over [0, 40 deg] the local band runs from s*lo*cos40 to s*hi, so some
    // scale keeps 750 nm inside the 99.5% band iff hi/lo >= 1/cos40.
    const coating::DepositionModel m{1.0};
    const double need = 1.0 / std::cos(40.0 * deg);
    tmm::StopBandScan scan;
    scan.threshold = 0.995;
    scan.lower_nm = 450.0;
    int agreements = 0;
    for (int pairs : {6, 8, 10, 12, 15}) {
        const auto stack = pinned_stack(pairs, 808.0);
        const auto band = tmm::stop_band(stack, 0.0, tmm::Polarization::TE, scan);
        REQUIRE(band.has_value());
        const bool predicted = band->upper_nm / band->lower_nm >= need;
        const auto opt = coating::optimize_center_scale(stack, m, 750.0, 40.0 * deg);
        const bool achieved = opt.min_reflectance >= 0.995;
        CHECK(predicted == achieved);
        agreements += predicted == achieved;
        CHECK(opt.bracket_low <= opt.center_scale);
        CHECK(opt.center_scale <= opt.bracket_high);
        // The optimum is at least as good as its neighbours.
        const double here = coating::worst_case_reflectance(stack, m, 750.0, 40.0 * deg, opt.center_scale, 0.5 * deg);
        CHECK(here == doctest::Approx(opt.min_reflectance).epsilon(1e-12));
        CHECK(here >= coating::worst_case_reflectance(stack, m, 750.0, 40.0 * deg, opt.center_scale * 1.01, 0.5 * deg));
        CHECK(here >= coating::worst_case_reflectance(stack, m, 750.0, 40.0 * deg, opt.center_scale * 0.99, 0.5 * deg));
    }
    CHECK(agreements == 5);
}

TEST_CASE("optimizer reports failure when nothing reflects") {
    tmm::LayerStack bare{1.0, {{tmm::complex(1.45, 0.0), 100.0, nullptr}}, 1.5};
    CHECK_THROWS_AS(coating::optimize_center_scale(bare, coating::DepositionModel{1.0}, 750.0, 40.0 * deg),
                    OptimizationError);
}
