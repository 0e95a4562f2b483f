#include "hemicav/cli/config.hpp"

#include <cmath>

#include "hemicav/stack_io.hpp"

namespace hcav::cli {

void Node::fail(const std::string& message) const { throw SchemaError(path_ + ": " + message); }

bool Node::has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

Node Node::at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    if (!value_->contains(key)) throw SchemaError(path_ + "." + key + ": missing required field");
    return Node((*value_)[key], path_ + "." + key);
}

std::optional<Node> Node::find(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return at(key);
}

std::vector<Node> Node::items() const {
    if (!value_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_->size(); ++i) out.emplace_back((*value_)[i], path_ + "[" + std::to_string(i) + "]");
    return out;
}

double Node::quantity(Dimension d) const {
    if (value_->is_number())
        fail(std::string("missing unit: write the ") + to_string(d) + " as a string such as \"" +
             std::to_string(value_->get<double>()) + " " + internal_unit(d) + "\"");
    if (!value_->is_string()) fail(std::string("expected a ") + to_string(d) + " string");
    std::string error;
    const auto v = parse_quantity(value_->get<std::string>(), d, &error);
    if (!v) fail(error);
    return *v;
}

double Node::number() const {
    if (!value_->is_number()) fail("expected a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
}

long Node::integer() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    return value_->get<long>();
}

bool Node::boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
}

std::string Node::string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
}

double Node::quantity_or(const std::string& key, Dimension d, double fallback) const {
    return has(key) ? at(key).quantity(d) : fallback;
}
double Node::number_or(const std::string& key, double fallback) const { return has(key) ? at(key).number() : fallback; }
long Node::integer_or(const std::string& key, long fallback) const { return has(key) ? at(key).integer() : fallback; }
bool Node::boolean_or(const std::string& key, bool fallback) const { return has(key) ? at(key).boolean() : fallback; }
std::string Node::string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).string() : fallback;
}

void Node::only(std::initializer_list<const char*> allowed) const {
    if (!value_->is_object()) fail("expected an object");
    for (const auto& [key, value] : value_->items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(path_ + "." + key + ": unknown field");
    }
}

StackSpec read_stack(const Node& node, const std::filesystem::path& base) {
    StackSpec out;
    if (node.has("file")) {
        node.only({"file"});
        std::filesystem::path p = node.at("file").string();
        if (p.is_relative()) p = base / p;
        auto file = io::read_stack_file(p.string());
        out.stack = std::move(file.stack);
        out.scale = file.scale;
        out.thinning_exponent = file.thinning_exponent;
        return out;
    }
    if (node.has("quarter_wave")) {
        node.only({"quarter_wave"});
        const Node q = node.at("quarter_wave");
        q.only({"n_high", "n_low", "substrate_index", "incident_index", "center_wavelength", "pairs", "high_first", "cap"});
        const long pairs = q.at("pairs").integer();
        if (pairs < 0) q.at("pairs").fail("must be >= 0");
        out.stack = tmm::quarter_wave_stack(q.number("n_high"), q.number("n_low"), q.number("substrate_index"),
                                            q.quantity("center_wavelength", Dimension::Length) * 1e3,
                                            static_cast<int>(pairs), q.boolean_or("high_first", true),
                                            q.boolean_or("cap", false), q.number_or("incident_index", 1.0));
        return out;
    }
    node.only({"incident_index", "substrate_index", "layers"});
    out.stack.incident_index = node.number_or("incident_index", 1.0);
    out.stack.substrate_index = node.number("substrate_index");
    for (const Node& layer : node.at("layers").items()) {
        layer.only({"index", "extinction", "thickness"});
        tmm::Layer l;
        l.refractive_index = {layer.number("index"), layer.number_or("extinction", 0.0)};
        l.thickness_nm = layer.quantity("thickness", Dimension::Length) * 1e3;
        out.stack.layers.push_back(l);
    }
    return out;
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw SchemaError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw SchemaError("--set key '" + key + "' has an empty component");
        if (!node->is_object()) throw SchemaError("--set key '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

}  // namespace hcav::cli
