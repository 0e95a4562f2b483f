#include "hemicav/stack_io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "hemicav/error.hpp"

namespace hcav::io {

namespace {

std::string strip(const std::string& line) {
    const auto hash = line.find('#');
    std::string s = line.substr(0, hash);
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
    throw FormatError("stack file line " + std::to_string(line_no) + ": " + msg);
}

void expect_end(std::istringstream& ss, int line_no) {
    std::string extra;
    if (ss >> extra) fail(line_no, "unexpected trailing token '" + extra + "'");
}

double number(std::istringstream& ss, int line_no, const char* what) {
    double v;
    if (!(ss >> v)) fail(line_no, std::string("expected ") + what);
    return v;
}

}  // namespace

StackFile parse_stack(std::istream& in) {
    StackFile file;
    std::map<std::string, std::shared_ptr<tmm::DispersionTable>> tables;
    std::shared_ptr<tmm::DispersionTable> open_table;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip(raw);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string head;
        ss >> head;

        if (open_table) {
            if (head == "end") {
                if (open_table->wavelength_nm.empty()) fail(line_no, "empty dispersion table");
                open_table.reset();
                continue;
            }
            std::istringstream row(line);
            const double wl = number(row, line_no, "table wavelength");
            const double nr = number(row, line_no, "table n_real");
            const double ni = number(row, line_no, "table n_imag");
            if (!open_table->wavelength_nm.empty() && wl <= open_table->wavelength_nm.back())
                fail(line_no, "table wavelengths must increase");
            open_table->wavelength_nm.push_back(wl);
            open_table->index.emplace_back(nr, ni);
            expect_end(row, line_no);
            continue;
        }

        if (head == "incident") {
            file.stack.incident_index = number(ss, line_no, "incident index");
        } else if (head == "substrate") {
            file.stack.substrate_index = number(ss, line_no, "substrate index");
        } else if (head == "scale") {
            file.scale = number(ss, line_no, "scale");
        } else if (head == "thinning_exponent") {
            file.thinning_exponent = number(ss, line_no, "thinning exponent");
        } else if (head == "dispersion") {
            std::string name;
            if (!(ss >> name)) fail(line_no, "dispersion table needs a name");
            open_table = std::make_shared<tmm::DispersionTable>();
            tables[name] = open_table;
        } else if (head.front() == '@') {
            const auto it = tables.find(head.substr(1));
            if (it == tables.end()) fail(line_no, "unknown dispersion table '" + head.substr(1) + "'");
            tmm::Layer layer;
            layer.dispersion = it->second;
            layer.refractive_index = it->second->index.front();
            layer.thickness_nm = number(ss, line_no, "thickness");
            file.stack.layers.push_back(layer);
        } else {
            std::istringstream row(line);
            const double nr = number(row, line_no, "n_real");
            const double ni = number(row, line_no, "n_imag");
            const double d = number(row, line_no, "thickness_nm");
            file.stack.layers.push_back({{nr, ni}, d, {}});
            expect_end(row, line_no);
            continue;
        }
        expect_end(ss, line_no);
    }
    if (open_table) fail(line_no, "unterminated dispersion table");
    try {
        file.stack.validate();
    } catch (const InputDomainError& e) {
        throw FormatError(std::string("stack file: ") + e.what());
    }
    return file;
}

StackFile read_stack_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stack file '" + path + "'");
    return parse_stack(in);
}

void write_stack(std::ostream& out, const StackFile& file) {
    const auto& s = file.stack;
    out << std::setprecision(17);
    out << "incident " << s.incident_index << "\n";
    out << "substrate " << s.substrate_index << "\n";
    if (file.scale) out << "scale " << *file.scale << "\n";
    if (file.thinning_exponent) out << "thinning_exponent " << *file.thinning_exponent << "\n";

    std::map<const tmm::DispersionTable*, std::string> names;
    for (const auto& l : s.layers) {
        if (!l.dispersion || names.count(l.dispersion.get())) continue;
        const std::string name = "table" + std::to_string(names.size());
        names[l.dispersion.get()] = name;
        out << "dispersion " << name << "\n";
        for (std::size_t i = 0; i < l.dispersion->wavelength_nm.size(); ++i)
            out << "  " << l.dispersion->wavelength_nm[i] << " " << l.dispersion->index[i].real() << " "
                << l.dispersion->index[i].imag() << "\n";
        out << "end\n";
    }
    for (const auto& l : s.layers) {
        if (l.dispersion)
            out << "@" << names[l.dispersion.get()] << " " << l.thickness_nm << "\n";
        else
            out << l.refractive_index.real() << " " << l.refractive_index.imag() << " " << l.thickness_nm << "\n";
    }
}

void write_stack_file(const std::string& path, const StackFile& file) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write stack file '" + path + "'");
    write_stack(out, file);
    if (!out) throw IoError("failed writing stack file '" + path + "'");
}

}  // namespace hcav::io
