#include "diffractnet/network.hpp"

#include "diffractnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace diffractnet {

LossKind parse_loss_kind(const std::string& name) {
    if (name == "cross-entropy") return LossKind::CrossEntropy;
    if (name == "mse" || name == "mean-squared-error") return LossKind::MeanSquaredError;
    throw std::invalid_argument("unknown loss kind: " + name);
}

std::string to_string(LossKind kind) {
    return kind == LossKind::CrossEntropy ? "cross-entropy" : "mean-squared-error";
}

ModulusKind parse_modulus_kind(const std::string& name) {
    if (name == "modulus") return ModulusKind::Modulus;
    if (name == "intensity") return ModulusKind::Intensity;
    throw std::invalid_argument("unknown modulus kind: " + name);
}

std::string to_string(ModulusKind kind) {
    return kind == ModulusKind::Modulus ? "modulus" : "intensity";
}

std::vector<double> pick_frequencies(double lambda_min, double lambda_max, int count) {
    if (!(lambda_min > 0.0) || !(lambda_min <= lambda_max))
        throw std::invalid_argument("pick_frequencies: need 0 < lambda_min <= lambda_max");
    if (count < 1) throw std::invalid_argument("pick_frequencies: count must be >= 1");
    if (count == 1) return {0.5 * (lambda_min + lambda_max)};
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = lambda_min + (lambda_max - lambda_min) * i / (count - 1);
    return out;
}

DetectorLayout make_detector_layout(const GridGeometry& geometry, int num_classes) {
    geometry.validate();
    if (num_classes < 1) throw std::invalid_argument("make_detector_layout: need >= 1 class");
    int cells = 1;
    while (cells * cells < num_classes) ++cells;
    const int cell_w = geometry.nx / cells;
    const int cell_h = geometry.ny / cells;
    const int side = std::min(cell_w, cell_h) / 2; // central 50% of the cell
    if (side < 1 || std::min(cell_w, cell_h) < 4)
        throw std::invalid_argument("make_detector_layout: grid too small for class count");
    const int off_x = (geometry.nx - cells * cell_w) / 2;
    const int off_y = (geometry.ny - cells * cell_h) / 2;
    DetectorLayout layout;
    layout.regions.reserve(num_classes);
    for (int c = 0; c < num_classes; ++c) {
        const int row = c / cells;
        const int col = c % cells;
        DetectorRegion r;
        r.w = side;
        r.h = side;
        r.x0 = off_x + col * cell_w + (cell_w - side) / 2;
        r.y0 = off_y + row * cell_h + (cell_h - side) / 2;
        layout.regions.push_back(r);
    }
    return layout;
}

void MFDNetConfig::validate() const {
    geometry.validate();
    if (num_layers < 1) throw std::invalid_argument("MFDNetConfig: num_layers must be >= 1");
    if (num_classes < 2) throw std::invalid_argument("MFDNetConfig: num_classes must be >= 2");
    if (wavelengths.empty()) throw std::invalid_argument("MFDNetConfig: need >= 1 wavelength");
    double prev = 0.0;
    for (double w : wavelengths) {
        if (!(w > 0.0)) throw std::invalid_argument("MFDNetConfig: wavelengths must be positive");
        if (w < prev) throw std::invalid_argument("MFDNetConfig: wavelengths must be ascending");
        prev = w;
    }
    if (!(layer_spacing > 0.0))
        throw std::invalid_argument("MFDNetConfig: layer_spacing must be positive");
}

std::vector<double> detector_readout(const RealMap& merged, const DetectorLayout& layout) {
    std::vector<double> scores(layout.regions.size(), 0.0);
    for (std::size_t c = 0; c < layout.regions.size(); ++c) {
        const auto& r = layout.regions[c];
        double s = 0.0;
        for (int y = r.y0; y < r.y0 + r.h; ++y)
            for (int x = r.x0; x < r.x0 + r.w; ++x) s += merged.at(x, y);
        scores[c] = s;
    }
    return scores;
}

double classification_loss(const std::vector<double>& logits, int label, LossKind kind) {
    const int C = static_cast<int>(logits.size());
    if (label < 0 || label >= C) throw std::invalid_argument("loss: label out of range");
    if (kind == LossKind::CrossEntropy) {
        const double m = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (double v : logits) sum += std::exp(v - m);
        return std::log(sum) - (logits[label] - m);
    }
    double sum = 0.0;
    for (int c = 0; c < C; ++c) {
        const double d = logits[c] - (c == label ? 1.0 : 0.0);
        sum += d * d;
    }
    return sum / C;
}

std::vector<double> classification_loss_gradient(const std::vector<double>& logits, int label,
                                                 LossKind kind) {
    const int C = static_cast<int>(logits.size());
    if (label < 0 || label >= C) throw std::invalid_argument("loss: label out of range");
    std::vector<double> g(C);
    if (kind == LossKind::CrossEntropy) {
        const double m = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (double v : logits) sum += std::exp(v - m);
        for (int c = 0; c < C; ++c) g[c] = std::exp(logits[c] - m) / sum;
        g[label] -= 1.0;
    } else {
        for (int c = 0; c < C; ++c)
            g[c] = 2.0 * (logits[c] - (c == label ? 1.0 : 0.0)) / C;
    }
    return g;
}

int argmax_lowest(const std::vector<double>& values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

MFDNet::MFDNet(MFDNetConfig config, KernelCache& kernels) : config_(std::move(config)) {
    config_.validate();
    layers_.reserve(config_.num_layers);
    for (int l = 0; l < config_.num_layers; ++l)
        layers_.push_back(ModulationParams::identity(config_.geometry,
                                                     config_.amplitude_trainable,
                                                     config_.bias_enabled));
    channel_weights_.assign(config_.wavelengths.size(),
                            1.0 / static_cast<double>(config_.wavelengths.size()));
    kernels_.reserve(config_.wavelengths.size());
    for (double lambda : config_.wavelengths)
        kernels_.push_back(
            kernels.get(config_.geometry, lambda, config_.layer_spacing, config_.method));
    detector_ = make_detector_layout(config_.geometry, config_.num_classes);
}

double MFDNet::phase_scale(int channel) const {
    if (!config_.dispersive) return 1.0;
    const double lambda_ref =
        0.5 * (config_.wavelengths.front() + config_.wavelengths.back());
    return lambda_ref / config_.wavelengths[channel];
}

void MFDNet::init_parameters(std::uint64_t seed) {
    Rng rng(seed);
    for (auto& layer : layers_) {
        for (auto& phi : layer.phase) phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        std::fill(layer.amplitude.begin(), layer.amplitude.end(), 1.0);
        layer.bias = cdouble{0.0, 0.0};
    }
    std::fill(channel_weights_.begin(), channel_weights_.end(),
              1.0 / static_cast<double>(channel_weights_.size()));
}

std::size_t MFDNet::trainable_parameter_count() const {
    std::size_t n = channel_weights_.size();
    for (const auto& layer : layers_) n += layer.trainable_count();
    return n;
}

std::vector<double> MFDNet::detector_readout(const RealMap& merged) const {
    return diffractnet::detector_readout(merged, detector_);
}

ForwardTrace MFDNet::forward(const ComplexField& input) const {
    if (input.geometry() != config_.geometry)
        throw std::invalid_argument("forward: input geometry mismatch");
    const int F = config_.channels();
    const int L = config_.num_layers;
    ForwardTrace trace;
    trace.pre_modulation.resize(F);
    trace.post_modulation.resize(F);
    trace.output_fields.reserve(F);
    trace.channels.reserve(F);
    trace.merged = RealMap(config_.geometry);
    for (int f = 0; f < F; ++f) {
        const auto& kernel = *kernels_[f];
        const double scale = phase_scale(f);
        trace.pre_modulation[f].reserve(L);
        trace.post_modulation[f].reserve(L);
        ComplexField u = input;
        for (int l = 0; l < L; ++l) {
            ComplexField z = propagate(u, kernel);
            ComplexField h = modulate(z, layers_[l], scale);
            trace.pre_modulation[f].push_back(std::move(z));
            u = h;
            trace.post_modulation[f].push_back(std::move(h));
        }
        ComplexField out = propagate(u, kernel);
        RealMap channel(config_.geometry);
        if (config_.modulus_kind == ModulusKind::Modulus) {
            channel = modulus(out);
        } else {
            for (std::size_t i = 0; i < out.size(); ++i) channel[i] = std::norm(out[i]);
        }
        for (std::size_t i = 0; i < channel.size(); ++i)
            trace.merged[i] += channel_weights_[f] * channel[i];
        trace.output_fields.push_back(std::move(out));
        trace.channels.push_back(std::move(channel));
    }
    trace.logits = detector_readout(trace.merged);
    return trace;
}

double MFDNet::loss(const ForwardTrace& trace, int label) const {
    return classification_loss(trace.logits, label, config_.loss_kind);
}

NetGradients MFDNet::zero_gradients() const {
    NetGradients g;
    g.layers.reserve(layers_.size());
    for (const auto& layer : layers_) g.layers.push_back(ParamGrad::zeros_like(layer));
    g.d_weights.assign(channel_weights_.size(), 0.0);
    return g;
}

void NetGradients::accumulate(const NetGradients& other) {
    if (other.layers.size() != layers.size() || other.d_weights.size() != d_weights.size())
        throw std::invalid_argument("NetGradients::accumulate: shape mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) layers[l].accumulate(other.layers[l]);
    for (std::size_t f = 0; f < d_weights.size(); ++f) d_weights[f] += other.d_weights[f];
}

void NetGradients::scale(double s) {
    for (auto& layer : layers) {
        for (auto& v : layer.d_amplitude) v *= s;
        for (auto& v : layer.d_phase) v *= s;
        layer.d_bias *= s;
    }
    for (auto& v : d_weights) v *= s;
}

NetGradients MFDNet::backward(const ForwardTrace& trace, int label) const {
    const int F = config_.channels();
    const int L = config_.num_layers;
    if (static_cast<int>(trace.channels.size()) != F ||
        static_cast<int>(trace.pre_modulation.size()) != F)
        throw std::invalid_argument("backward: trace does not match this network");
    for (int f = 0; f < F; ++f)
        if (static_cast<int>(trace.pre_modulation[f].size()) != L)
            throw std::invalid_argument("backward: trace does not match this network");

    NetGradients grads = zero_gradients();
    const std::vector<double> d_logits =
        classification_loss_gradient(trace.logits, label, config_.loss_kind);

    // Scatter logit gradients back onto the merged map (regions are disjoint).
    RealMap grad_merged(config_.geometry);
    for (std::size_t c = 0; c < detector_.regions.size(); ++c) {
        const auto& r = detector_.regions[c];
        for (int y = r.y0; y < r.y0 + r.h; ++y)
            for (int x = r.x0; x < r.x0 + r.w; ++x) grad_merged.at(x, y) = d_logits[c];
    }

    for (int f = 0; f < F; ++f) {
        const auto& kernel = *kernels_[f];
        const double scale = phase_scale(f);
        const auto& channel = trace.channels[f];
        const auto& out = trace.output_fields[f];

        double dw = 0.0;
        for (std::size_t i = 0; i < channel.size(); ++i) dw += grad_merged[i] * channel[i];
        grads.d_weights[f] = dw;

        // Through the channel map into the output field.
        ComplexField grad_out(config_.geometry);
        const double w = channel_weights_[f];
        if (config_.modulus_kind == ModulusKind::Modulus) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double m = channel[i];
                // subgradient 0 at |u| = 0
                grad_out[i] = m > 0.0 ? (w * grad_merged[i] / m) * out[i] : cdouble{0.0, 0.0};
            }
        } else {
            for (std::size_t i = 0; i < out.size(); ++i)
                grad_out[i] = 2.0 * w * grad_merged[i] * out[i];
        }

        ComplexField grad_h = propagate_adjoint(grad_out, kernel);
        for (int l = L - 1; l >= 0; --l) {
            auto back = modulate_backward(grad_h, trace.pre_modulation[f][l], layers_[l], scale);
            grads.layers[l].accumulate(back.grads);
            if (l > 0) grad_h = propagate_adjoint(back.grad_z, kernel);
        }
    }
    return grads;
}

int MFDNet::predict(const ComplexField& input) const {
    return argmax_lowest(forward(input).logits);
}

} // namespace diffractnet
