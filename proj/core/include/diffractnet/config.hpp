#pragma once

#include "diffractnet/network.hpp"
#include "diffractnet/training.hpp"

#include <string>

namespace diffractnet {

/// Full run configuration: network + training + dataset paths + output
/// directory. Parsed from a flat dotted-key text file ("key = value" lines,
/// '#' comments); unknown keys are an error.
struct RunConfig {
    // net.*
    int net_layers = 5;
    int net_nx = 56;
    int net_ny = 56;
    double net_pitch = 1.0;
    double net_spacing = 20.0;
    double net_lambda_min = 0.8;
    double net_lambda_max = 1.2;
    int net_channels = 3;
    std::string net_method = "sampled-rs";
    std::string net_loss = "cross-entropy";
    int net_classes = 10;
    bool net_amplitude_trainable = false;
    bool net_bias = false;
    bool net_dispersive = false;
    std::string net_modulus = "modulus";

    // train.*
    std::string train_optimizer = "adam";
    double train_lr = 1e-3;
    double train_momentum = 0.9;
    double train_beta1 = 0.9;
    double train_beta2 = 0.999;
    double train_epsilon = 1e-8;
    std::size_t train_batch = 32;
    int train_epochs = 10;
    std::uint64_t train_seed = 1;
    std::size_t train_subset_train = 0;
    std::size_t train_subset_test = 0;

    // gradcheck.*
    int gradcheck_probes = 20;
    double gradcheck_epsilon = 1e-6;

    // data.*
    std::string data_train_images;
    std::string data_train_labels;
    std::string data_test_images;
    std::string data_test_labels;
    bool data_orientation_fix = false;

    // out.*
    std::string out_dir = "out";

    void set(const std::string& key, const std::string& value);

    MFDNetConfig net_config() const;
    TrainConfig train_config() const;

    /// Canonical text form: every key, sorted, one per line. Reparsing it
    /// reproduces the config exactly.
    std::string serialize() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Applies a "key=value" command-line override.
void apply_override(RunConfig& config, const std::string& assignment);

} // namespace diffractnet
