#include "diffractnet/checkpoint.hpp"
#include "diffractnet/config.hpp"
#include "diffractnet/data.hpp"
#include "diffractnet/image_io.hpp"
#include "diffractnet/network.hpp"
#include "diffractnet/training.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace diffractnet;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
    cmd->add_option("--seed", args.seed, "override train.seed");
    cmd->add_option("--out", args.out_dir, "override out.dir");
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig config =
        args.config_path.empty() ? RunConfig{} : load_run_config(args.config_path);
    for (const auto& assignment : args.overrides) apply_override(config, assignment);
    if (args.seed) config.train_seed = *args.seed;
    if (args.out_dir) config.out_dir = *args.out_dir;
    return config;
}

Dataset load_split(const std::string& images, const std::string& labels, const RunConfig& config,
                   std::size_t subset) {
    Dataset ds = load_dataset(images, labels, config.net_classes, config.data_orientation_fix);
    if (subset > 0) ds.truncate(subset);
    return ds;
}

std::string csv_row(const EpochMetrics& m) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.3f\n", m.epoch, m.train_loss,
                  m.train_accuracy, m.test_accuracy, m.seconds);
    return buf;
}

int cmd_train(const CommonArgs& args) {
    const RunConfig config = resolve_config(args);
    const TrainConfig train_cfg = config.train_config();
    Dataset train_set = load_split(config.data_train_images, config.data_train_labels, config,
                                   train_cfg.subset_train);
    Dataset test_set = load_split(config.data_test_images, config.data_test_labels, config,
                                  train_cfg.subset_test);

    KernelCache kernels;
    MFDNet net(config.net_config(), kernels);
    net.init_parameters(train_cfg.seed);

    fs::create_directories(config.out_dir);
    const fs::path csv_path = fs::path(config.out_dir) / "metrics.csv";
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) {
        std::cerr << "error: cannot write " << csv_path << "\n";
        return 1;
    }
    csv << "epoch,train_loss,train_acc,test_acc,seconds\n";

    OptimizerState state = OptimizerState::zeros_like(net);
    Rng rng(train_cfg.seed);
    for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        EpochMetrics metrics = train_epoch(net, train_set, train_cfg, state, rng);
        metrics.epoch = epoch;
        metrics.test_accuracy = evaluate(net, test_set);
        metrics.seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        csv << csv_row(metrics);
        csv.flush();
        std::cerr << "epoch " << epoch << ": loss " << metrics.train_loss << " train_acc "
                  << metrics.train_accuracy << " test_acc " << metrics.test_accuracy << " ("
                  << metrics.seconds << " s)\n";
    }
    save_checkpoint((fs::path(config.out_dir) / "model.mfdn").string(), config, net);
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const CommonArgs& args) {
    KernelCache kernels;
    LoadedCheckpoint loaded = load_checkpoint(checkpoint_path, kernels);
    RunConfig config = loaded.config;
    const int checkpoint_classes = config.net_classes;
    for (const auto& assignment : args.overrides) apply_override(config, assignment);
    if (config.net_classes != checkpoint_classes)
        throw std::runtime_error("eval: num_classes cannot be overridden");
    Dataset test_set = load_split(config.data_test_images, config.data_test_labels, config,
                                  config.train_subset_test);
    const double accuracy = evaluate(loaded.net, test_set);
    std::printf("%.4f\n", accuracy);
    return 0;
}

ComplexField load_input_image(const std::string& path, const GridGeometry& geometry) {
    // Either a 28x28 binary PGM or a 1-sample IDX images file.
    std::ifstream probe(path, std::ios::binary);
    char head[2] = {0, 0};
    probe.read(head, 2);
    probe.close();
    if (head[0] == 'P' && head[1] == '5') {
        const GrayImage img = read_pgm(path);
        if (img.width != 28 || img.height != 28)
            throw std::runtime_error("expected a 28x28 image, got " +
                                     std::to_string(img.width) + "x" +
                                     std::to_string(img.height));
        return to_input_field(img.pixels.data(), geometry);
    }
    const IdxTensor t = load_idx(path);
    if (t.dims.size() != 3 || t.dims[0] != 1 || t.dims[1] != 28 || t.dims[2] != 28)
        throw std::runtime_error("expected a 1x28x28 IDX file: " + path);
    return to_input_field(t.bytes.data(), geometry);
}

int cmd_predict(const std::string& checkpoint_path, const std::string& image_path) {
    KernelCache kernels;
    LoadedCheckpoint loaded = load_checkpoint(checkpoint_path, kernels);
    const ComplexField input =
        load_input_image(image_path, loaded.net.config().geometry);
    const ForwardTrace trace = loaded.net.forward(input);
    const int cls = argmax_lowest(trace.logits);
    std::printf("class %d\n", cls);
    for (std::size_t c = 0; c < trace.logits.size(); ++c)
        std::printf("score[%zu] = %.9g\n", c, trace.logits[c]);
    return 0;
}

int cmd_gradcheck(const CommonArgs& args, bool flip_sign) {
    const RunConfig config = resolve_config(args);
    if (config.gradcheck_probes < 1)
        throw std::invalid_argument("gradcheck.probes must be >= 1");
    if (!(config.gradcheck_epsilon > 0.0))
        throw std::invalid_argument("gradcheck.epsilon must be > 0");

    KernelCache kernels;
    MFDNet net(config.net_config(), kernels);
    net.init_parameters(config.train_seed);

    Rng rng(config.train_seed + 1);
    ComplexField input(net.config().geometry);
    for (auto& v : input.values()) v = cdouble{rng.gaussian(), rng.gaussian()};
    const int label = static_cast<int>(rng.below(net.config().num_classes));

    GradCheckOptions options;
    options.n_probes = config.gradcheck_probes;
    options.epsilon = config.gradcheck_epsilon;
    options.seed = config.train_seed + 2;
    options.flip_sign = flip_sign;
    const double worst = grad_check(net, input, label, options);
    std::printf("max relative error: %.3e\n", worst);
    return worst < 1e-4 ? 0 : 1;
}

int cmd_export_maps(const std::string& checkpoint_path, const std::string& image_path,
                    const std::string& out_dir) {
    KernelCache kernels;
    LoadedCheckpoint loaded = load_checkpoint(checkpoint_path, kernels);
    const ComplexField input =
        load_input_image(image_path, loaded.net.config().geometry);
    const ForwardTrace trace = loaded.net.forward(input);
    fs::create_directories(out_dir);
    for (std::size_t f = 0; f < trace.channels.size(); ++f) {
        const fs::path path = fs::path(out_dir) / ("channel_" + std::to_string(f) + ".pgm");
        write_pgm16(path.string(), trace.channels[f]);
    }
    write_pgm16((fs::path(out_dir) / "merged.pgm").string(), trace.merged);
    const int cls = argmax_lowest(trace.logits);
    std::printf("class %d, wrote %zu maps to %s\n", cls, trace.channels.size() + 1,
                out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-frequency diffractive network trainer"};
    app.require_subcommand(1);

    CommonArgs train_args, eval_args, gradcheck_args;
    std::string checkpoint_path, image_path, maps_out = "maps";
    bool flip_sign = false;

    auto* train = app.add_subcommand("train", "train a network and write metrics + checkpoint");
    add_common(train, train_args);

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a test set");
    eval->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    add_common(eval, eval_args);

    auto* predict = app.add_subcommand("predict", "classify one image");
    predict->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    predict->add_option("image", image_path, "28x28 P5 graymap or 1x28x28 IDX file")->required();

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    add_common(gradcheck, gradcheck_args);
    gradcheck->add_flag("--flip-sign", flip_sign, "test hook: negate analytic gradients");

    auto* export_maps = app.add_subcommand("export-maps", "write channel and merged maps as PGM");
    export_maps->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    export_maps->add_option("image", image_path, "input image")->required();
    export_maps->add_option("--out", maps_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (eval->parsed()) return cmd_eval(checkpoint_path, eval_args);
        if (predict->parsed()) return cmd_predict(checkpoint_path, image_path);
        if (gradcheck->parsed()) return cmd_gradcheck(gradcheck_args, flip_sign);
        if (export_maps->parsed()) return cmd_export_maps(checkpoint_path, image_path, maps_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
