#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hemicav/error.hpp"
#include "hemicav/grid_io.hpp"

using namespace hcav;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hemicav_test_grid_io";
    fs::create_directories(dir);
    return dir / name;
}
}  // namespace

TEST_CASE("binary grid round trip") {
    io::Grid g{3, 2, 0.125, io::GridComponent::EnergyDensity, {1.0, -2.5, 3e-300, NAN, 5.0, 1e300}};
    const auto p = scratch("a.hcg");
    io::write_grid(p, g);
    CHECK(fs::file_size(p) == 8 + 4 + 4 + 8 + 4 + 6 * 8);
    const auto back = io::read_grid(p);
    CHECK(back.nx == 3);
    CHECK(back.ny == 2);
    CHECK(back.pitch_um == 0.125);
    CHECK(back.component == io::GridComponent::EnergyDensity);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (std::isnan(g.values[i]))
            CHECK(std::isnan(back.values[i]));
        else
            CHECK(back.values[i] == g.values[i]);
    }
}

TEST_CASE("binary grid rejects bad files") {
    const auto p = scratch("bad.hcg");
    std::ofstream(p) << "NOTAGRID and some bytes";
    CHECK_THROWS_AS(io::read_grid(p), FormatError);
    io::write_grid(p, {4, 4, 1.0, io::GridComponent::Height, std::vector<double>(16, 1.0)});
    fs::resize_file(p, fs::file_size(p) - 8);
    CHECK_THROWS_AS(io::read_grid(p), FormatError);
    CHECK_THROWS_AS(io::read_grid(scratch("missing.hcg")), IoError);
}

TEST_CASE("csv grid round trip") {
    io::Grid g{2, 3, 0.5, io::GridComponent::Height, {0.1, 0.2, NAN, 0.4, 1.0 / 3.0, -6.0}};
    const auto p = scratch("a.csv");
    io::write_grid_csv(p, g);
    const auto back = io::read_grid_csv(p);
    CHECK(back.nx == 2);
    CHECK(back.ny == 3);
    CHECK(back.pitch_um == 0.5);
    CHECK(std::isnan(back.values[2]));
    CHECK(back.values[4] == 1.0 / 3.0);
}

TEST_CASE("csv grid without header uses the default pitch") {
    const auto p = scratch("plain.csv");
    std::ofstream(p) << "1,2,3\n4,,6\n";
    const auto g = io::read_grid_csv(p, 0.2);
    CHECK(g.pitch_um == 0.2);
    CHECK(g.nx == 3);
    CHECK(std::isnan(g.values[4]));

    std::ofstream(p) << "1,2,3\n4,5\n";
    CHECK_THROWS_AS(io::read_grid_csv(p), FormatError);
}
