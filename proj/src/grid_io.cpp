#include "hemicav/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "hemicav/error.hpp"

namespace hcav::io {

namespace {

constexpr char magic[8] = {'H', 'C', 'A', 'V', 'G', 'R', 'D', '1'};

template <typename T>
void put(std::ostream& os, T value) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
    char bytes[sizeof(T)];
    if (!is.read(bytes, sizeof(T))) throw FormatError(path.string() + ": truncated grid file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

void check(const Grid& g) {
    if (g.values.size() != static_cast<std::size_t>(g.nx) * g.ny)
        throw InputDomainError("grid value count does not match its dimensions");
}

}  // namespace

void write_grid(const std::filesystem::path& path, const Grid& grid) {
    check(grid);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(magic, sizeof(magic));
    put<std::uint32_t>(os, grid.nx);
    put<std::uint32_t>(os, grid.ny);
    put<double>(os, grid.pitch_um);
    put<std::int32_t>(os, static_cast<std::int32_t>(grid.component));
    for (double v : grid.values) put<double>(os, v);
    if (!os) throw IoError("failed writing " + path.string());
}

Grid read_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    char head[8];
    if (!is.read(head, sizeof(head)) || std::memcmp(head, magic, sizeof(magic)) != 0)
        throw FormatError(path.string() + ": not a grid file (bad magic)");
    Grid g;
    g.nx = get<std::uint32_t>(is, path);
    g.ny = get<std::uint32_t>(is, path);
    g.pitch_um = get<double>(is, path);
    const auto id = get<std::int32_t>(is, path);
    if (id < 0 || id > 7) throw FormatError(path.string() + ": unknown component id " + std::to_string(id));
    g.component = static_cast<GridComponent>(id);
    const auto n = static_cast<std::size_t>(g.nx) * g.ny;
    if (n > (std::size_t{1} << 31)) throw FormatError(path.string() + ": grid dimensions are implausible");
    g.values.resize(n);
    for (auto& v : g.values) v = get<double>(is, path);
    return g;
}

void write_grid_csv(const std::filesystem::path& path, const Grid& grid) {
    check(grid);
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "# pitch_um=" << std::setprecision(17) << grid.pitch_um << " component="
       << static_cast<int>(grid.component) << '\n';
    for (std::uint32_t y = 0; y < grid.ny; ++y) {
        for (std::uint32_t x = 0; x < grid.nx; ++x) {
            if (x) os << ',';
            os << grid.values[static_cast<std::size_t>(y) * grid.nx + x];
        }
        os << '\n';
    }
    if (!os) throw IoError("failed writing " + path.string());
}

Grid read_grid_csv(const std::filesystem::path& path, double default_pitch_um) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    Grid g;
    g.pitch_um = default_pitch_um;
    std::string line;
    int line_no = 0;
    std::size_t width = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
                try {
                    if (key == "pitch_um") g.pitch_um = std::stod(value);
                    if (key == "component") g.component = static_cast<GridComponent>(std::stoi(value));
                } catch (const std::exception&) {
                    throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad header value '" + token + "'");
                }
            }
            continue;
        }
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            cell.erase(0, cell.find_first_not_of(" \t"));
            cell.erase(cell.find_last_not_of(" \t") + 1);
            double v = std::numeric_limits<double>::quiet_NaN();
            if (!cell.empty() && cell != "nan" && cell != "NaN") {
                std::size_t used = 0;
                try {
                    v = std::stod(cell, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != cell.size())
                    throw FormatError(path.string() + ":" + std::to_string(line_no) + ": not a number '" + cell + "'");
            }
            g.values.push_back(v);
            ++count;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (width == 0) width = count;
        if (count != width)
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": row has " + std::to_string(count) +
                              " values, expected " + std::to_string(width));
        ++g.ny;
    }
    if (g.ny == 0) throw FormatError(path.string() + ": empty grid");
    g.nx = static_cast<std::uint32_t>(width);
    return g;
}

}  // namespace hcav::io
