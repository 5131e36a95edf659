#pragma once

#include "diffractnet/data.hpp"
#include "diffractnet/network.hpp"
#include "diffractnet/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diffractnet {

enum class OptimizerKind { Adam, SgdMomentum };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    int epochs = 10;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    std::size_t subset_train = 0; // 0 = full set
    std::size_t subset_test = 0;

    void validate() const;
};

/// Moment/velocity accumulators mirroring the trainable parameters of a net.
/// Adam uses both slots; SGD with momentum uses only the first.
struct OptimizerState {
    NetGradients m; // first moments / velocity
    NetGradients v; // second moments (adam)
    std::int64_t step_count = 0;

    static OptimizerState zeros_like(const MFDNet& net);
};

/// One optimizer update applied in place; amplitude grids are clamped to
/// >= 0 afterwards.
void step(MFDNet& net, const NetGradients& grads, OptimizerState& state,
          const TrainConfig& config);

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double seconds = 0.0;
};

/// One full shuffled pass: per batch, mean of per-sample gradients, one
/// optimizer step. Fills train_loss/train_accuracy; test_accuracy and
/// seconds are the caller's concern. Samples within a batch run in parallel;
/// gradients are reduced in batch-index order so results are independent of
/// scheduling.
EpochMetrics train_epoch(MFDNet& net, const Dataset& dataset, const TrainConfig& config,
                         OptimizerState& state, Rng& rng);

/// Fraction of samples with predict(net, x) == y.
double evaluate(const MFDNet& net, const Dataset& dataset);

struct GradCheckOptions {
    int n_probes = 20;
    double epsilon = 1e-6;
    std::uint64_t seed = 1;
    bool flip_sign = false; // test hook: negates analytic gradients
};

/// Compares backward() against central finite differences of the loss on
/// randomly selected trainable scalars; returns the worst relative error.
/// The error is 0 when both analytic and numeric values are below 1e-12.
double grad_check(MFDNet& net, const ComplexField& input, int label,
                  const GradCheckOptions& options);

} // namespace diffractnet
