#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hemicav/cli/app.hpp"
#include "hemicav/cli/units.hpp"
#include "hemicav/grid_io.hpp"

using namespace hcav;
using cli::json;
namespace fs = std::filesystem;

namespace {

const fs::path root = fs::temp_directory_path() / "hemicav_test_cli";

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path write_config(const std::string& name, const json& config) {
    fs::create_directories(root);
    const auto p = root / name;
    std::ofstream(p) << config.dump(2);
    return p;
}

json report(const fs::path& dir) {
    std::ifstream in(dir / "report.json");
    return json::parse(in);
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

json quarter_wave_sweep() {
    return {{"stack",
             {{"quarter_wave",
               {{"n_high", 2.3}, {"n_low", 1.45}, {"substrate_index", 1.5}, {"center_wavelength", "750 nm"}, {"pairs", 8},
                {"high_first", true}, {"cap", true}}}}},
            {"wavelength", {{"start", "600 nm"}, {"stop", "900 nm"}, {"points", 301}}},
            {"polarization", "TE"}};
}

}  // namespace

TEST_CASE("quantity parsing") {
    std::string error;
    CHECK(cli::parse_quantity("750 nm", cli::Dimension::Length, &error).value() == doctest::Approx(0.75));
    CHECK(cli::parse_quantity("1.5mm", cli::Dimension::Length, &error).value() == doctest::Approx(1500.0));
    CHECK(cli::parse_quantity("0.4 meV", cli::Dimension::Energy, &error).value() == doctest::Approx(400.0));
    CHECK(cli::parse_quantity("40 deg", cli::Dimension::Angle, &error).value() == doctest::Approx(40.0 * M_PI / 180.0));
    CHECK(std::isinf(cli::parse_quantity("inf um", cli::Dimension::Length, &error).value()));
    CHECK_FALSE(cli::parse_quantity("10", cli::Dimension::Length, &error).has_value());
    CHECK(error.find("unit") != std::string::npos);
    CHECK_FALSE(cli::parse_quantity("10 THz", cli::Dimension::Length, &error).has_value());
}

TEST_CASE("tmm sweep writes the quarter-wave reflectance") {
    const auto cfg = write_config("sweep.json", quarter_wave_sweep());
    const auto out = root / "sweep";
    const auto r = invoke({"tmm", "sweep", "-c", cfg.string(), "-o", out.string()});
    REQUIRE(r.code == 0);
    const auto rep = report(out);
    CHECK(rep["schema"] == cli::report_schema);
    CHECK(rep["command"] == "tmm sweep");
    CHECK(rep["config"] == quarter_wave_sweep());
    const auto rows = read_csv(out / "sweep.csv");
    REQUIRE(rows.size() == 301);
    const double y = std::pow(2.3 / 1.45, 16) * 2.3 * 2.3 / 1.5;
    CHECK(rows[150][0] == 750.0);
    CHECK(std::abs(rows[150][1] - std::pow((1 - y) / (1 + y), 2)) < 1e-10);
    for (const auto& row : rows) CHECK(row[1] + row[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep["outputs"]["stop_band"]["lower_nm"].get<double>() < 750.0);
}

TEST_CASE("identical configs give identical outputs") {
    const auto cfg = write_config("det.json", quarter_wave_sweep());
    REQUIRE(invoke({"tmm", "sweep", "-c", cfg.string(), "-o", (root / "det1").string()}).code == 0);
    REQUIRE(invoke({"tmm", "sweep", "-c", cfg.string(), "-o", (root / "det2").string()}).code == 0);
    auto a = report(root / "det1"), b = report(root / "det2");
    a.erase("wall_time_s");
    b.erase("wall_time_s");
    CHECK(a == b);
    std::ifstream fa(root / "det1" / "sweep.csv"), fb(root / "det2" / "sweep.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("exit codes") {
    auto bad = quarter_wave_sweep();
    bad["stack"]["quarter_wave"]["center_wavelength"] = 750;
    const auto missing_unit = write_config("nounit.json", bad);
    const auto r2 = invoke({"tmm", "sweep", "-c", missing_unit.string(), "-o", (root / "x").string()});
    CHECK(r2.code == 2);
    CHECK(r2.err.find("config.stack.quarter_wave.center_wavelength") != std::string::npos);

    auto extra = quarter_wave_sweep();
    extra["colour"] = "blue";
    CHECK(invoke({"tmm", "sweep", "-c", write_config("extra.json", extra).string()}).code == 2);

    fs::create_directories(root);
    std::ofstream(root / "broken.json") << "{\n  \"stack\": [1, 2,\n";
    const auto parse = invoke({"tmm", "sweep", "-c", (root / "broken.json").string()});
    CHECK(parse.code == 2);
    CHECK(parse.err.find("line") != std::string::npos);

    CHECK(invoke({"tmm", "frobnicate", "-c", missing_unit.string()}).code == 2);
    CHECK(invoke({"tmm", "sweep"}).code == 2);

    auto zero = quarter_wave_sweep();
    zero["stack"]["quarter_wave"]["pairs"] = 0;
    const auto r3 = invoke({"tmm", "sweep", "-c", write_config("zero.json", zero).string(), "-o", (root / "x").string()});
    CHECK(r3.code == 3);
    CHECK(r3.err.find("tmm") != std::string::npos);

    CHECK(invoke({"tmm", "sweep", "-c", (root / "no_such.json").string()}).code == 4);
    const auto blocker = root / "blocker";
    std::ofstream(blocker) << "a file where a directory should be";
    CHECK(invoke({"tmm", "sweep", "-c", write_config("ok.json", quarter_wave_sweep()).string(), "-o",
                  (blocker / "sub").string()})
              .code == 4);
}

TEST_CASE("overrides and the output directory variable") {
    const auto cfg = write_config("ovr.json", quarter_wave_sweep());
    const auto dir = root / "env_out";
    fs::remove_all(dir);
    ::setenv(cli::output_env, dir.string().c_str(), 1);
    const auto r = invoke({"tmm", "sweep", "-c", cfg.string(), "--set", "wavelength.points=11", "--set",
                           "stack.quarter_wave.pairs=4"});
    ::unsetenv(cli::output_env);
    REQUIRE(r.code == 0);
    const auto rep = report(dir);
    CHECK(rep["config"]["wavelength"]["points"] == 11);
    CHECK(rep["outputs"]["layers"] == 9);
    CHECK(read_csv(dir / "sweep.csv").size() == 11);
    CHECK(invoke({"tmm", "sweep", "-c", cfg.string(), "--set", "wavelength.points"}).code == 2);
}

TEST_CASE("cqed report with the strong-coupling inputs") {
    const json c = {{"emitter",
                     {{"dipole_moment", "60 D"}, {"transition_wavelength", "750 nm"}, {"linewidth", "15 ueV"}}},
                    {"cavity", {{"length", "50 um"}, {"mirror_reflectivity", 0.996}, {"waist", "0.5 um"}}}};
    const auto out = root / "cqed";
    REQUIRE(invoke({"cqed", "report", "-c", write_config("cqed.json", c).string(), "-o", out.string()}).code == 0);
    const auto o = report(out)["outputs"];
    CHECK(o["coupling_energy_ueV"].get<double>() == doctest::Approx(49.0).epsilon(0.05));
    CHECK(o["kappa_ueV"].get<double>() == doctest::Approx(8.0).epsilon(0.1));
    CHECK(o["strong"] == true);
}

TEST_CASE("cqed spectrum and fit round trip") {
    const json c = {{"emitter", {{"dipole_moment", "60 D"}, {"transition_wavelength", "750 nm"}, {"linewidth", "15 ueV"}}},
                    {"cavity", {{"length", "50 um"}, {"mirror_reflectivity", 0.996}, {"waist", "0.5 um"}}},
                    {"detuning", {{"start", "-200 ueV"}, {"stop", "200 ueV"}, {"points", 2001}}},
                    {"coupling", "49 ueV"},
                    {"noise", {{"relative", 0.001}, {"seed", 7}}}};
    const auto out = root / "spec";
    REQUIRE(invoke({"cqed", "spectrum", "-c", write_config("spec.json", c).string(), "-o", out.string()}).code == 0);
    CHECK(report(out)["outputs"]["central_dip"] == true);
    const json f = {{"spectrum_file", (out / "spectrum.csv").string()}, {"analysis", "normal_modes"}};
    const auto fo = root / "fit";
    REQUIRE(invoke({"cqed", "fit", "-c", write_config("fit.json", f).string(), "-o", fo.string()}).code == 0);
    const auto o = report(fo)["outputs"];
    CHECK(o["coupling_ueV"].get<double>() == doctest::Approx(49.0).epsilon(0.01));
}

TEST_CASE("modes spectrum and coating optimize") {
    const json m = {{"cavity", {{"length", "60 um"}, {"mirror_radius", "60.00006 um"}}},
                    {"wavelength_min", "740 nm"},
                    {"wavelength_max", "760 nm"},
                    {"max_transverse_order", 2}};
    const auto mo = root / "modes";
    REQUIRE(invoke({"modes", "spectrum", "-c", write_config("modes.json", m).string(), "-o", mo.string()}).code == 0);
    CHECK(report(mo)["outputs"]["transverse_spacing_thz"].get<double>() == doctest::Approx(299.792458 / 240.0).epsilon(1e-3));
    CHECK(fs::exists(mo / "modes.csv"));

    const json c = {{"stack",
                     {{"quarter_wave",
                       {{"n_high", 2.3}, {"n_low", 1.45}, {"substrate_index", 1.5}, {"center_wavelength", "687 nm"},
                        {"pairs", 15}, {"cap", true}}}}},
                    {"working_wavelength", "750 nm"},
                    {"max_angle", "40 deg"},
                    {"thinning_exponent", 1.0}};
    const auto co = root / "coat";
    REQUIRE(invoke({"coating", "optimize", "-c", write_config("coat.json", c).string(), "-o", co.string()}).code == 0);
    const auto o = report(co)["outputs"];
    CHECK(o["min_reflectance"].get<double>() >= 0.995);
    CHECK(o["cutoff_angle_deg_unoptimized"].get<double>() == doctest::Approx(21.8).epsilon(0.05));
    CHECK(fs::exists(co / "design.stack"));

    // The written design file feeds back into the profile command.
    const json p = {{"stack", {{"file", (co / "design.stack").string()}}}, {"working_wavelength", "750 nm"}, {"max_angle", "40 deg"}};
    const auto po = root / "coat_profile";
    REQUIRE(invoke({"coating", "profile", "-c", write_config("prof.json", p).string(), "-o", po.string()}).code == 0);
    CHECK(report(po)["outputs"]["min_reflectance"].get<double>() == doctest::Approx(o["min_reflectance"].get<double>()).epsilon(1e-3));
}

TEST_CASE("surface commands") {
    const int n = 101;
    io::Grid g{n, n, 0.15, io::GridComponent::Height, std::vector<double>(n * n)};
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double x = (ix - 50) * 0.15, y = (iy - 50) * 0.15;
            g.values[iy * n + ix] = 1e3 * (50.0 - std::sqrt(2500.0 - x * x - y * y)) + 0.3 * std::sin(1.7 * x) * std::cos(2.3 * y);
        }
    fs::create_directories(root);
    io::write_grid(root / "dimple.hcg", g);
    io::write_grid_csv(root / "dimple.csv", g);

    const json s = {{"map", {{"file", "dimple.hcg"}}}, {"region", {{"center_x", "7.5 um"}, {"center_y", "7.5 um"}, {"diameter", "12 um"}}}};
    const auto so = root / "sphere";
    REQUIRE(invoke({"surface", "sphere", "-c", write_config("sphere.json", s).string(), "-o", so.string()}).code == 0);
    CHECK(report(so)["outputs"]["radius_um"].get<double>() == doctest::Approx(50.0).epsilon(1e-2));

    const json p = {{"map", {{"file", "dimple.csv"}}}, {"window", "hann"}, {"band", {{"low", "100 mm^-1"}, {"high", "2000 mm^-1"}}}};
    const auto po = root / "psd";
    REQUIRE(invoke({"surface", "psd", "-c", write_config("psd.json", p).string(), "-o", po.string()}).code == 0);
    CHECK(fs::exists(po / "psd.csv"));

    const json b = {{"sigma", "1 nm"}, {"wavelength", "750 nm"}, {"mirror_transmissions", {1e-4, 1e-4}}};
    const auto bo = root / "budget";
    REQUIRE(invoke({"surface", "budget", "-c", write_config("budget.json", b).string(), "-o", bo.string()}).code == 0);
    CHECK(report(bo)["outputs"]["total_integrated_scatter"].get<double>() == doctest::Approx(2.807e-4).epsilon(1e-3));

    const json flat = {{"map", {{"file", "missing.hcg"}}}, {"region", {{"center_x", "1 um"}, {"center_y", "1 um"}, {"diameter", "1 um"}}}};
    CHECK(invoke({"surface", "sphere", "-c", write_config("nomap.json", flat).string(), "-o", so.string()}).code == 4);
}

TEST_CASE("fdtd simulate and analyze on a small planar cavity") {
    const json c = {{"cavity", {{"length", "2 um"}, {"mirror_radius", "inf um"}}},
                    {"domain", {{"design_wavelength", "1500 nm"}, {"resolution", 16}, {"radial_extent", "3 um"}}},
                    {"source", {{"kind", "sheet_x"}, {"sheet_radius", "3 um"}, {"z", "0.5 um"}, {"center_frequency", "150 THz"},
                                {"bandwidth", "150 THz"}}},
                    {"probes", {{{"r", "0.05 um"}, {"z", "1.1 um"}}}},
                    {"duration_cycles", 400},
                    {"analysis", {{"min_frequency", "50 THz"}, {"max_frequency", "300 THz"}}}};
    const auto out = root / "fdtd";
    const auto r = invoke({"fdtd", "simulate", "-c", write_config("fdtd.json", c).string(), "-o", out.string()});
    REQUIRE(r.code == 0);
    const auto res = report(out)["outputs"]["resonances"];
    REQUIRE(res.size() >= 1);
    // Lowest TE11 line of a closed cylinder of radius a and height L.
    const double L = report(out)["outputs"]["domain"]["cavity_length_um"].get<double>();
    const double te11 = 299.792458 * std::hypot(1.0 / (2.0 * L), 1.841184 / (2.0 * M_PI * 3.0));
    bool first = false;
    for (const auto& line : res) first = first || std::abs(line["frequency_thz"].get<double>() / te11 - 1.0) < 0.01;
    CHECK(first);
    CHECK(report(out)["warnings"].size() == 1);  // shorter than the recommended record

    const json a = {{"record_file", (out / "probes.csv").string()},
                    {"analysis", {{"min_frequency", "50 THz"}, {"max_frequency", "300 THz"}}}};
    const auto ao = root / "fdtd_analyze";
    REQUIRE(invoke({"fdtd", "analyze", "-c", write_config("analyze.json", a).string(), "-o", ao.string()}).code == 0);
    CHECK(report(ao)["outputs"]["resonances"] == res);
}

TEST_CASE("shipped tmm sweep config reproduces the golden file") {
    // The golden file was generated once and checked against the closed-form
    // quarter-wave reflectance at 750 nm.
    const fs::path src = HEMICAV_SOURCE_DIR;
    const auto out = root / "golden";
    REQUIRE(invoke({"tmm", "sweep", "-c", (src / "configs" / "tmm_sweep.json").string(), "-o", out.string()}).code == 0);
    const auto got = read_csv(out / "sweep.csv");
    const auto want = read_csv(src / "tests" / "golden" / "tmm_sweep.csv");
    REQUIRE(got.size() == want.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i)
        for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(got[i][j] - want[i][j]));
    CHECK(worst < 1e-12);
    const double y = std::pow(2.3 / 1.45, 16) * 2.3 * 2.3 / 1.5;
    CHECK(want[150][0] == 750.0);
    CHECK(want[150][1] == doctest::Approx(std::pow((1.0 - y) / (1.0 + y), 2)).epsilon(1e-12));
}
