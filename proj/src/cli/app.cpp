#include "hemicav/cli/app.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hemicav/error.hpp"

namespace hcav::cli {

std::filesystem::path RunContext::output_path(const std::string& name) {
    files.push_back(name);
    return out_dir / name;
}

std::filesystem::path RunContext::input_path(const std::string& relative) const {
    std::filesystem::path p = relative;
    return p.is_relative() ? config_dir / p : p;
}

void RunContext::write_csv(const std::string& name, const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& rows, const std::string& comment) {
    const auto path = output_path(name);
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    if (!comment.empty()) os << "# " << comment << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n' << std::setprecision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    if (!os) throw IoError("failed writing " + path.string());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hemispherical micro-cavity design and analysis suite", "hemicav"};
    std::string module, action, config_path, out_dir;
    std::vector<std::string> overrides;
    app.add_option("module", module, "tmm | coating | modes | cqed | fdtd | surface")->required();
    app.add_option("action", action, "module pipeline, e.g. sweep")->required();
    app.add_option("-c,--config", config_path, "JSON run configuration")->required();
    app.add_option("-o,--out", out_dir, std::string("output directory (default $") + output_env + " or ./hemicav-out)");
    app.add_option("--set", overrides, "override a config field: key.path=value")->take_all();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return schema_violation;
    }

    const std::string name = module + " " + action;
    Command command = nullptr;
    for (const auto& [n, c] : commands())
        if (n == name) command = c;
    if (!command) {
        err << "error: unknown command '" << name << "'; known:";
        for (const auto& [n, c] : commands()) err << " [" << n << "]";
        err << '\n';
        return schema_violation;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot open config " + config_path);
        json config;
        try {
            config = json::parse(in);
        } catch (const json::parse_error& e) {
            throw SchemaError(config_path + ": " + e.what());
        }
        if (!config.is_object()) throw SchemaError(config_path + ": top level must be an object");
        for (const auto& o : overrides) apply_override(config, o);

        if (out_dir.empty()) {
            const char* env = std::getenv(output_env);
            out_dir = env && *env ? env : "hemicav-out";
        }
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

        RunContext ctx{Node(config, "config"), std::filesystem::absolute(config_path).parent_path(), out_dir, json::object(), {}, {}};
        command(ctx);

        json report;
        report["schema"] = report_schema;
        report["command"] = name;
        report["config"] = config;
        report["outputs"] = ctx.outputs;
        report["files"] = ctx.files;
        report["warnings"] = ctx.warnings;
        report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        const auto report_path = std::filesystem::path(out_dir) / "report.json";
        std::ofstream rs(report_path);
        if (!rs) throw IoError("cannot write " + report_path.string());
        rs << report.dump(2) << '\n';
        if (!rs) throw IoError("failed writing " + report_path.string());
        for (const auto& w : ctx.warnings) err << "warning: " << w << '\n';
        out << report_path.string() << '\n';
        return ok;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return schema_violation;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return schema_violation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return io_failure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return io_failure;
    } catch (const Error& e) {
        err << "error: " << module << ": " << e.what() << '\n';
        return domain_error;
    }
}

}  // namespace hcav::cli
