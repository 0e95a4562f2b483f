#pragma once

// Schema-checked access to a JSON run configuration. Every accessor knows
// the dotted path of the value it reads, so violations name the field.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemicav/cli/units.hpp"
#include "hemicav/tmm.hpp"
#include "json.hpp"

namespace hcav::cli {

using json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Node {
public:
    Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return *value_; }
    bool has(const std::string& key) const;
    Node at(const std::string& key) const;
    std::optional<Node> find(const std::string& key) const;
    std::vector<Node> items() const;

    double quantity(Dimension d) const;
    double number() const;
    long integer() const;
    bool boolean() const;
    std::string string() const;

    double quantity(const std::string& key, Dimension d) const { return at(key).quantity(d); }
    double quantity_or(const std::string& key, Dimension d, double fallback) const;
    double number(const std::string& key) const { return at(key).number(); }
    double number_or(const std::string& key, double fallback) const;
    long integer_or(const std::string& key, long fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;

    /// Rejects keys outside `allowed`.
    void only(std::initializer_list<const char*> allowed) const;

    [[noreturn]] void fail(const std::string& message) const;

private:
    const json* value_;
    std::string path_;
};

/// Stack from {"file": path} (relative to `base`), {"quarter_wave": {...}}
/// or {"incident_index", "substrate_index", "layers": [...]}.
struct StackSpec {
    tmm::LayerStack stack;
    std::optional<double> scale;
    std::optional<double> thinning_exponent;
};
StackSpec read_stack(const Node& node, const std::filesystem::path& base);

/// Applies "a.b.c=value" overrides; the value is parsed as JSON when it
/// parses, otherwise taken as a string.
void apply_override(json& config, const std::string& assignment);

}  // namespace hcav::cli
