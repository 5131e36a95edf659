#include "diffractnet/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace diffractnet {

namespace {

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected a boolean, got: " + v);
}

double parse_double(const std::string& v) {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("expected a number, got: " + v);
    return d;
}

long long parse_int(const std::string& v) {
    std::size_t pos = 0;
    const long long n = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("expected an integer, got: " + v);
    return n;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define FIELD_STR(key, member)                                         \
    {key, Entry{[](RunConfig& c, const std::string& v) { c.member = v; }, \
                [](const RunConfig& c) { return c.member; }}}
#define FIELD_BOOL(key, member)                                                        \
    {key, Entry{[](RunConfig& c, const std::string& v) { c.member = parse_bool(v); },  \
                [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }}}
#define FIELD_DOUBLE(key, member)                                                       \
    {key, Entry{[](RunConfig& c, const std::string& v) { c.member = parse_double(v); }, \
                [](const RunConfig& c) { return format_double(c.member); }}}
#define FIELD_INT(key, member, type)                                                        \
    {key, Entry{[](RunConfig& c, const std::string& v) {                                    \
                    c.member = static_cast<type>(parse_int(v));                             \
                },                                                                          \
                [](const RunConfig& c) { return std::to_string(c.member); }}}

const std::map<std::string, Entry>& registry() {
    static const std::map<std::string, Entry> table = {
        FIELD_INT("net.layers", net_layers, int),
        FIELD_INT("net.nx", net_nx, int),
        FIELD_INT("net.ny", net_ny, int),
        FIELD_DOUBLE("net.pitch", net_pitch),
        FIELD_DOUBLE("net.spacing", net_spacing),
        FIELD_DOUBLE("net.lambda_min", net_lambda_min),
        FIELD_DOUBLE("net.lambda_max", net_lambda_max),
        FIELD_INT("net.channels", net_channels, int),
        FIELD_STR("net.method", net_method),
        FIELD_STR("net.loss", net_loss),
        FIELD_INT("net.classes", net_classes, int),
        FIELD_BOOL("net.amplitude_trainable", net_amplitude_trainable),
        FIELD_BOOL("net.bias", net_bias),
        FIELD_BOOL("net.dispersive", net_dispersive),
        FIELD_STR("net.modulus", net_modulus),
        FIELD_STR("train.optimizer", train_optimizer),
        FIELD_DOUBLE("train.lr", train_lr),
        FIELD_DOUBLE("train.momentum", train_momentum),
        FIELD_DOUBLE("train.beta1", train_beta1),
        FIELD_DOUBLE("train.beta2", train_beta2),
        FIELD_DOUBLE("train.epsilon", train_epsilon),
        FIELD_INT("train.batch", train_batch, std::size_t),
        FIELD_INT("train.epochs", train_epochs, int),
        FIELD_INT("train.seed", train_seed, std::uint64_t),
        FIELD_INT("train.subset_train", train_subset_train, std::size_t),
        FIELD_INT("train.subset_test", train_subset_test, std::size_t),
        FIELD_INT("gradcheck.probes", gradcheck_probes, int),
        FIELD_DOUBLE("gradcheck.epsilon", gradcheck_epsilon),
        FIELD_STR("data.train_images", data_train_images),
        FIELD_STR("data.train_labels", data_train_labels),
        FIELD_STR("data.test_images", data_test_images),
        FIELD_STR("data.test_labels", data_test_labels),
        FIELD_BOOL("data.orientation_fix", data_orientation_fix),
        FIELD_STR("out.dir", out_dir),
    };
    return table;
}

#undef FIELD_STR
#undef FIELD_BOOL
#undef FIELD_DOUBLE
#undef FIELD_INT

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto& table = registry();
    const auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument("unknown config key: " + key);
    it->second.set(*this, value);
}

MFDNetConfig RunConfig::net_config() const {
    MFDNetConfig c;
    c.num_layers = net_layers;
    c.geometry = GridGeometry{net_nx, net_ny, net_pitch};
    c.layer_spacing = net_spacing;
    c.wavelengths = pick_frequencies(net_lambda_min, net_lambda_max, net_channels);
    c.method = parse_propagation_method(net_method);
    c.loss_kind = parse_loss_kind(net_loss);
    c.num_classes = net_classes;
    c.amplitude_trainable = net_amplitude_trainable;
    c.bias_enabled = net_bias;
    c.dispersive = net_dispersive;
    c.modulus_kind = parse_modulus_kind(net_modulus);
    c.validate();
    return c;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig c;
    c.learning_rate = train_lr;
    c.batch_size = train_batch;
    c.epochs = train_epochs;
    c.optimizer = parse_optimizer_kind(train_optimizer);
    c.momentum = train_momentum;
    c.beta1 = train_beta1;
    c.beta2 = train_beta2;
    c.epsilon = train_epsilon;
    c.seed = train_seed;
    c.subset_train = train_subset_train;
    c.subset_test = train_subset_test;
    c.validate();
    return c;
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    for (const auto& [key, entry] : registry()) out << key << " = " << entry.get(*this) << "\n";
    return out.str();
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        config.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be key=value: " + assignment);
    config.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

} // namespace diffractnet
