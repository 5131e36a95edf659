#include "diffractnet/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace diffractnet {

ModulationParams ModulationParams::identity(const GridGeometry& geometry, bool amplitude_trainable,
                                            bool bias_enabled) {
    geometry.validate();
    ModulationParams p;
    p.geometry = geometry;
    p.amplitude.assign(geometry.pixels(), 1.0);
    p.phase.assign(geometry.pixels(), 0.0);
    p.amplitude_trainable = amplitude_trainable;
    p.bias_enabled = bias_enabled;
    return p;
}

std::size_t ModulationParams::trainable_count() const {
    std::size_t n = geometry.pixels(); // phase
    if (amplitude_trainable) n += geometry.pixels();
    if (bias_enabled) n += 2;
    return n;
}

ParamGrad ParamGrad::zeros_like(const ModulationParams& params) {
    ParamGrad g;
    g.d_amplitude.assign(params.geometry.pixels(), 0.0);
    g.d_phase.assign(params.geometry.pixels(), 0.0);
    return g;
}

void ParamGrad::accumulate(const ParamGrad& other) {
    if (other.d_amplitude.size() != d_amplitude.size())
        throw std::invalid_argument("ParamGrad::accumulate: shape mismatch");
    for (std::size_t i = 0; i < d_amplitude.size(); ++i) d_amplitude[i] += other.d_amplitude[i];
    for (std::size_t i = 0; i < d_phase.size(); ++i) d_phase[i] += other.d_phase[i];
    d_bias += other.d_bias;
}

ComplexField modulate(const ComplexField& z, const ModulationParams& params, double phase_scale) {
    if (z.geometry() != params.geometry)
        throw std::invalid_argument("modulate: geometry mismatch");
    ComplexField h(z.geometry());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double phi = params.phase[i] * phase_scale;
        const cdouble t = params.amplitude[i] * cdouble{std::cos(phi), std::sin(phi)};
        h[i] = t * z[i];
    }
    if (params.bias_enabled)
        for (auto& v : h.values()) v += params.bias;
    return h;
}

ModulateBackwardResult modulate_backward(const ComplexField& grad_h, const ComplexField& z_cached,
                                         const ModulationParams& params, double phase_scale) {
    if (grad_h.geometry() != params.geometry || z_cached.geometry() != params.geometry)
        throw std::invalid_argument("modulate_backward: geometry mismatch");
    ModulateBackwardResult r;
    r.grad_z = ComplexField(params.geometry);
    r.grads = ParamGrad::zeros_like(params);
    for (std::size_t i = 0; i < grad_h.size(); ++i) {
        const double phi = params.phase[i] * phase_scale;
        const cdouble e{std::cos(phi), std::sin(phi)};
        const cdouble t = params.amplitude[i] * e;
        const cdouble g = grad_h[i];
        const cdouble z = z_cached[i];
        r.grad_z[i] = std::conj(t) * g;
        // dL/dphi = Re[conj(g) * j*t*z] * phase_scale
        const cdouble tz = t * z;
        r.grads.d_phase[i] = phase_scale * (g.imag() * tz.real() - g.real() * tz.imag());
        if (params.amplitude_trainable)
            r.grads.d_amplitude[i] = (std::conj(g) * e * z).real();
    }
    if (params.bias_enabled) {
        cdouble sum{0.0, 0.0};
        for (const auto& g : grad_h.values()) sum += g;
        r.grads.d_bias = sum;
    }
    return r;
}

} // namespace diffractnet
