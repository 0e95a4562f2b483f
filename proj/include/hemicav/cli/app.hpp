#pragma once

// `hemicav <module> <action> --config run.json [--out dir] [--set key=value]...`
//
// Exit codes: 0 success, 2 usage/schema/format violation, 3 domain error
// raised by a module, 4 I/O failure.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hemicav/cli/config.hpp"

namespace hcav::cli {

inline constexpr const char* report_schema = "hemicav.run_report/1";
inline constexpr const char* output_env = "HEMICAV_OUT";

enum ExitCode : int { ok = 0, schema_violation = 2, domain_error = 3, io_failure = 4 };

struct RunContext {
    Node config;
    std::filesystem::path config_dir;
    std::filesystem::path out_dir;
    json outputs = json::object();
    std::vector<std::string> files;
    std::vector<std::string> warnings;

    /// Writes a CSV with full double precision and records it in `files`.
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows, const std::string& comment = {});
    std::filesystem::path output_path(const std::string& name);
    std::filesystem::path input_path(const std::string& relative) const;
};

using Command = void (*)(RunContext&);

/// Names accepted as "<module> <action>".
const std::vector<std::pair<std::string, Command>>& commands();

/// Full run with argument parsing; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hcav::cli
