#pragma once

#include "diffractnet/field.hpp"
#include "diffractnet/layers.hpp"
#include "diffractnet/propagation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diffractnet {

enum class LossKind { CrossEntropy, MeanSquaredError };
enum class ModulusKind { Modulus, Intensity };

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);
ModulusKind parse_modulus_kind(const std::string& name);
std::string to_string(ModulusKind kind);

/// F wavelengths linearly spaced over [lambda_min, lambda_max], inclusive of
/// both endpoints; F == 1 yields the midpoint.
std::vector<double> pick_frequencies(double lambda_min, double lambda_max, int count);

/// Axis-aligned pixel rectangle [x0, x0+w) x [y0, y0+h).
struct DetectorRegion {
    int x0 = 0, y0 = 0, w = 0, h = 0;
    bool contains(int x, int y) const {
        return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
    }
};

/// C disjoint detector squares on the output plane, one per class.
struct DetectorLayout {
    std::vector<DetectorRegion> regions;
};

/// Equal-size squares placed row-major on the smallest g x g cell grid with
/// g^2 >= C, centered within the field; each square is the central 50% of its
/// cell. Throws when cells are too small to host a centered square.
DetectorLayout make_detector_layout(const GridGeometry& geometry, int num_classes);

struct MFDNetConfig {
    int num_layers = 5;
    std::vector<double> wavelengths; // sorted ascending, F >= 1
    double layer_spacing = 20.0;
    GridGeometry geometry{56, 56, 1.0};
    PropagationMethod method = PropagationMethod::SampledRS;
    LossKind loss_kind = LossKind::CrossEntropy;
    int num_classes = 10;
    bool amplitude_trainable = false;
    bool bias_enabled = false;
    bool dispersive = false;
    ModulusKind modulus_kind = ModulusKind::Modulus;

    void validate() const;
    int channels() const { return static_cast<int>(wavelengths.size()); }
};

/// Cached intermediates of one forward pass, consumed by backward().
struct ForwardTrace {
    // per frequency: pre-modulation field z_l for each layer l = 1..L
    std::vector<std::vector<ComplexField>> pre_modulation;
    // per frequency: post-modulation field h_l for each layer
    std::vector<std::vector<ComplexField>> post_modulation;
    std::vector<ComplexField> output_fields; // per frequency, at the output plane
    std::vector<RealMap> channels;           // per frequency modulus (or intensity) maps
    RealMap merged;
    std::vector<double> logits;
};

struct NetGradients {
    std::vector<ParamGrad> layers;
    std::vector<double> d_weights;

    void accumulate(const NetGradients& other);
    void scale(double s);
};

class MFDNet {
public:
    MFDNet(MFDNetConfig config, KernelCache& kernels);

    const MFDNetConfig& config() const { return config_; }

    std::vector<ModulationParams>& layers() { return layers_; }
    const std::vector<ModulationParams>& layers() const { return layers_; }

    std::vector<double>& channel_weights() { return channel_weights_; }
    const std::vector<double>& channel_weights() const { return channel_weights_; }

    const DetectorLayout& detector() const { return detector_; }
    const PropagationKernel& kernel(int channel) const { return *kernels_[channel]; }

    /// lambda_ref / lambda_f phase scaling in dispersive mode, else 1.
    double phase_scale(int channel) const;

    /// Randomize phases uniformly in [0, 2pi); amplitude = 1, bias = 0,
    /// channel weights = 1/F.
    void init_parameters(std::uint64_t seed);

    std::size_t trainable_parameter_count() const;

    ForwardTrace forward(const ComplexField& input) const;
    double loss(const ForwardTrace& trace, int label) const;
    NetGradients backward(const ForwardTrace& trace, int label) const;
    int predict(const ComplexField& input) const;

    std::vector<double> detector_readout(const RealMap& merged) const;

    NetGradients zero_gradients() const;

private:
    MFDNetConfig config_;
    std::vector<ModulationParams> layers_;
    std::vector<double> channel_weights_;
    std::vector<std::shared_ptr<const PropagationKernel>> kernels_; // per frequency
    DetectorLayout detector_;
};

/// Sum of map values over each detector region, one score per class.
std::vector<double> detector_readout(const RealMap& merged, const DetectorLayout& layout);

double classification_loss(const std::vector<double>& logits, int label, LossKind kind);
std::vector<double> classification_loss_gradient(const std::vector<double>& logits, int label,
                                                 LossKind kind);

int argmax_lowest(const std::vector<double>& values);

} // namespace diffractnet
