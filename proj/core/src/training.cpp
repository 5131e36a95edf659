#include "diffractnet/training.hpp"

#include "diffractnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diffractnet {

OptimizerKind parse_optimizer_kind(const std::string& name) {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "sgd-momentum") return OptimizerKind::SgdMomentum;
    throw std::invalid_argument("unknown optimizer: " + name);
}

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::Adam ? "adam" : "sgd-momentum";
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
}

OptimizerState OptimizerState::zeros_like(const MFDNet& net) {
    OptimizerState s;
    s.m = net.zero_gradients();
    s.v = net.zero_gradients();
    return s;
}

namespace {

struct AdamScalars {
    double lr, beta1, beta2, eps, bias1, bias2;
};

void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 const AdamScalars& a) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = a.beta1 * m[i] + (1.0 - a.beta1) * grad[i];
        v[i] = a.beta2 * v[i] + (1.0 - a.beta2) * grad[i] * grad[i];
        const double mhat = m[i] / a.bias1;
        const double vhat = v[i] / a.bias2;
        param[i] -= a.lr * mhat / (std::sqrt(vhat) + a.eps);
    }
}

void sgd_update(double* param, const double* grad, double* velocity, std::size_t n, double lr,
                double momentum) {
    for (std::size_t i = 0; i < n; ++i) {
        velocity[i] = momentum * velocity[i] + grad[i];
        param[i] -= lr * velocity[i];
    }
}

} // namespace

void step(MFDNet& net, const NetGradients& grads, OptimizerState& state,
          const TrainConfig& config) {
    if (grads.layers.size() != net.layers().size() ||
        grads.d_weights.size() != net.channel_weights().size())
        throw std::invalid_argument("step: gradient shape mismatch");
    state.step_count += 1;

    auto update = [&](double* param, const double* grad, double* m, double* v, std::size_t n) {
        if (config.optimizer == OptimizerKind::Adam) {
            const double t = static_cast<double>(state.step_count);
            const AdamScalars a{config.learning_rate, config.beta1,
                                config.beta2,         config.epsilon,
                                1.0 - std::pow(config.beta1, t),
                                1.0 - std::pow(config.beta2, t)};
            adam_update(param, grad, m, v, n, a);
        } else {
            sgd_update(param, grad, m, n, config.learning_rate, config.momentum);
        }
    };

    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        auto& layer = net.layers()[l];
        const auto& g = grads.layers[l];
        auto& m = state.m.layers[l];
        auto& v = state.v.layers[l];
        update(layer.phase.data(), g.d_phase.data(), m.d_phase.data(), v.d_phase.data(),
               layer.phase.size());
        if (layer.amplitude_trainable) {
            update(layer.amplitude.data(), g.d_amplitude.data(), m.d_amplitude.data(),
                   v.d_amplitude.data(), layer.amplitude.size());
            for (auto& a : layer.amplitude) a = std::max(0.0, a);
        }
        if (layer.bias_enabled) {
            double b[2] = {layer.bias.real(), layer.bias.imag()};
            const double gb[2] = {g.d_bias.real(), g.d_bias.imag()};
            double mb[2] = {m.d_bias.real(), m.d_bias.imag()};
            double vb[2] = {v.d_bias.real(), v.d_bias.imag()};
            update(b, gb, mb, vb, 2);
            layer.bias = cdouble{b[0], b[1]};
            m.d_bias = cdouble{mb[0], mb[1]};
            v.d_bias = cdouble{vb[0], vb[1]};
        }
    }
    update(net.channel_weights().data(), grads.d_weights.data(), state.m.d_weights.data(),
           state.v.d_weights.data(), net.channel_weights().size());
}

EpochMetrics train_epoch(MFDNet& net, const Dataset& dataset, const TrainConfig& config,
                         OptimizerState& state, Rng& rng) {
    config.validate();
    if (dataset.size() == 0) throw std::invalid_argument("train_epoch: empty dataset");
    if (dataset.num_classes != net.config().num_classes)
        throw std::invalid_argument("train_epoch: class-count mismatch");

    double loss_sum = 0.0;
    std::size_t correct = 0;
    const auto batch_plan = batches(dataset.size(), config.batch_size, rng);
    for (const auto& batch : batch_plan) {
        std::vector<NetGradients> sample_grads(batch.size());
        std::vector<double> sample_loss(batch.size());
        std::vector<char> sample_correct(batch.size());
        parallel_for(batch.size(), [&](std::size_t k) {
            const std::uint32_t idx = batch[k];
            const ComplexField input =
                to_input_field(dataset.image(idx), net.config().geometry);
            const int label = dataset.labels[idx];
            const ForwardTrace trace = net.forward(input);
            sample_loss[k] = net.loss(trace, label);
            sample_correct[k] = argmax_lowest(trace.logits) == label;
            sample_grads[k] = net.backward(trace, label);
        });
        NetGradients batch_grad = net.zero_gradients();
        for (const auto& g : sample_grads) batch_grad.accumulate(g);
        batch_grad.scale(1.0 / static_cast<double>(batch.size()));
        for (double l : sample_loss) loss_sum += l;
        for (char c : sample_correct) correct += c;
        step(net, batch_grad, state, config);
    }
    EpochMetrics metrics;
    metrics.train_loss = loss_sum / static_cast<double>(dataset.size());
    metrics.train_accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    return metrics;
}

double evaluate(const MFDNet& net, const Dataset& dataset) {
    if (dataset.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
    std::vector<char> correct(dataset.size());
    parallel_for(dataset.size(), [&](std::size_t i) {
        const ComplexField input = to_input_field(dataset.image(i), net.config().geometry);
        correct[i] = net.predict(input) == dataset.labels[i];
    });
    std::size_t n = 0;
    for (char c : correct) n += c;
    return static_cast<double>(n) / static_cast<double>(dataset.size());
}

namespace {

// Flat view over the trainable scalars of a net: phase grids, amplitude
// grids when trainable, bias real/imag pairs when enabled, channel weights.
struct ScalarRef {
    double* param;
    const double* grad;
};

std::vector<ScalarRef> trainable_scalars(MFDNet& net, const NetGradients& grads) {
    std::vector<ScalarRef> out;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        auto& layer = net.layers()[l];
        const auto& g = grads.layers[l];
        for (std::size_t i = 0; i < layer.phase.size(); ++i)
            out.push_back({&layer.phase[i], &g.d_phase[i]});
        if (layer.amplitude_trainable)
            for (std::size_t i = 0; i < layer.amplitude.size(); ++i)
                out.push_back({&layer.amplitude[i], &g.d_amplitude[i]});
        // bias lives inside std::complex and is probed separately in grad_check
    }
    for (std::size_t f = 0; f < net.channel_weights().size(); ++f)
        out.push_back({&net.channel_weights()[f], &grads.d_weights[f]});
    return out;
}

} // namespace

double grad_check(MFDNet& net, const ComplexField& input, int label,
                  const GradCheckOptions& options) {
    if (options.n_probes < 1) throw std::invalid_argument("grad_check: n_probes must be >= 1");
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("grad_check: epsilon must be > 0");

    const ForwardTrace trace = net.forward(input);
    NetGradients grads = net.backward(trace, label);
    if (options.flip_sign) grads.scale(-1.0);

    auto loss_now = [&] { return net.loss(net.forward(input), label); };

    // Bias parameters live inside std::complex, so probe them separately.
    struct Probe {
        double* param;
        double analytic;
    };
    std::vector<Probe> pool;
    auto refs = trainable_scalars(net, grads);
    pool.reserve(refs.size());
    for (const auto& r : refs) pool.push_back({r.param, *r.grad});
    std::vector<std::pair<std::size_t, int>> bias_slots; // (layer, 0=re 1=im)
    if (!net.layers().empty() && net.layers().front().bias_enabled)
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            bias_slots.emplace_back(l, 0);
            bias_slots.emplace_back(l, 1);
        }

    Rng rng(options.seed);
    double worst = 0.0;
    const std::size_t total = pool.size() + bias_slots.size();
    for (int p = 0; p < options.n_probes; ++p) {
        const std::size_t pick = static_cast<std::size_t>(rng.below(total));
        double analytic;
        double numeric;
        if (pick < pool.size()) {
            auto& probe = pool[pick];
            analytic = probe.analytic;
            const double saved = *probe.param;
            *probe.param = saved + options.epsilon;
            const double lp = loss_now();
            *probe.param = saved - options.epsilon;
            const double lm = loss_now();
            *probe.param = saved;
            numeric = (lp - lm) / (2.0 * options.epsilon);
        } else {
            const auto [l, comp] = bias_slots[pick - pool.size()];
            auto& layer = net.layers()[l];
            const cdouble g = grads.layers[l].d_bias;
            analytic = comp == 0 ? g.real() : g.imag();
            const cdouble saved = layer.bias;
            const cdouble delta = comp == 0 ? cdouble{options.epsilon, 0.0}
                                            : cdouble{0.0, options.epsilon};
            layer.bias = saved + delta;
            const double lp = loss_now();
            layer.bias = saved - delta;
            const double lm = loss_now();
            layer.bias = saved;
            numeric = (lp - lm) / (2.0 * options.epsilon);
        }
        double rel;
        if (std::abs(analytic) < 1e-12 && std::abs(numeric) < 1e-12)
            rel = 0.0;
        else
            rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric));
        worst = std::max(worst, rel);
    }
    return worst;
}

} // namespace diffractnet
