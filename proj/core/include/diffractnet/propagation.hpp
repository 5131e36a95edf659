#pragma once

#include "diffractnet/field.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace diffractnet {

enum class PropagationMethod {
    SampledRS,       // Rayleigh-Sommerfeld impulse response sampled on the grid
    AngularSpectrum, // phase-only transfer function in the frequency domain
};

PropagationMethod parse_propagation_method(const std::string& name);
std::string to_string(PropagationMethod method);

/// Free-space Rayleigh-Sommerfeld impulse response between two points
/// separated by (dx, dy, dz), dz > 0:
///   (dz/r^2) * (1/(2*pi*r) + 1/(j*lambda)) * exp(j*2*pi*r/lambda)
/// The vector obliquity factor is taken as its axial component dz/r^2,
/// which changes off-axis amplitudes relative to a naive |p-p_i|/r^2
/// reading; this is the standard RS-I inclination term.
cdouble rs_impulse(double dx, double dy, double dz, double wavelength);

/// Precomputed frequency-domain transfer data for one
/// (geometry, wavelength, distance, method) triple.
class PropagationKernel {
public:
    const GridGeometry& geometry() const { return geom_; }
    double wavelength() const { return wavelength_; }
    double distance() const { return distance_; }
    PropagationMethod method() const { return method_; }

    /// Transfer spectrum: 2nx x 2ny for SampledRS, nx x ny for AngularSpectrum.
    const ComplexField& transfer() const { return transfer_; }

    friend PropagationKernel build_kernel(const GridGeometry& geometry, double wavelength,
                                          double distance, PropagationMethod method);

private:
    GridGeometry geom_;
    double wavelength_ = 0.0;
    double distance_ = 0.0;
    PropagationMethod method_ = PropagationMethod::SampledRS;
    ComplexField transfer_;
};

PropagationKernel build_kernel(const GridGeometry& geometry, double wavelength, double distance,
                               PropagationMethod method);

/// Applies the kernel's linear map. SampledRS does a zero-padded linear
/// convolution (no wraparound); AngularSpectrum filters the unpadded spectrum.
ComplexField propagate(const ComplexField& field, const PropagationKernel& kernel);

/// Conjugate-transpose of propagate: <propagate(u), v> == <u, propagate_adjoint(v)>.
ComplexField propagate_adjoint(const ComplexField& grad, const PropagationKernel& kernel);

/// Literal O(N^4) superposition sum, used as the verification oracle for
/// SampledRS. Refuses grids with more than 4096 pixels.
ComplexField direct_sum_oracle(const ComplexField& field, double wavelength, double distance);

/// Keyed store of immutable kernels, one per (geometry, wavelength, distance,
/// method), built on first use and shared for the lifetime of the cache.
class KernelCache {
public:
    std::shared_ptr<const PropagationKernel> get(const GridGeometry& geometry, double wavelength,
                                                 double distance, PropagationMethod method);

private:
    using Key = std::tuple<int, int, double, double, double, int>;
    std::mutex mutex_;
    std::map<Key, std::shared_ptr<const PropagationKernel>> cache_;
};

} // namespace diffractnet
