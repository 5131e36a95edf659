#pragma once

#include "diffractnet/field.hpp"

#include <vector>

namespace diffractnet {

/// Learnable per-pixel modulation t = a * exp(j*phi), plus an optional single
/// complex bias per layer. With amplitude_trainable == false the amplitude
/// grid is identically 1 and only the phase grid is trained.
struct ModulationParams {
    GridGeometry geometry;
    std::vector<double> amplitude; // a_i >= 0
    std::vector<double> phase;     // radians, unbounded
    bool amplitude_trainable = false;
    bool bias_enabled = false;
    cdouble bias{0.0, 0.0};

    static ModulationParams identity(const GridGeometry& geometry, bool amplitude_trainable,
                                     bool bias_enabled);

    std::size_t trainable_count() const;
};

/// Gradient carrier mirroring ModulationParams.
struct ParamGrad {
    std::vector<double> d_amplitude;
    std::vector<double> d_phase;
    cdouble d_bias{0.0, 0.0};

    static ParamGrad zeros_like(const ModulationParams& params);
    void accumulate(const ParamGrad& other);
};

/// h = a * exp(j * phi * phase_scale) * z  (+ bias if enabled).
/// phase_scale is 1 except in dispersive mode, where it is lambda_ref/lambda.
ComplexField modulate(const ComplexField& z, const ModulationParams& params,
                      double phase_scale = 1.0);

/// Reverse pass of modulate. Gradients of the real loss are carried as
/// dL/dRe + j*dL/dIm; grad_z = conj(t)*grad_h, and parameter gradients follow
/// the chain rule through t = a*exp(j*phi*s).
struct ModulateBackwardResult {
    ComplexField grad_z;
    ParamGrad grads;
};

ModulateBackwardResult modulate_backward(const ComplexField& grad_h, const ComplexField& z_cached,
                                         const ModulationParams& params, double phase_scale = 1.0);

} // namespace diffractnet
