#include "diffractnet/propagation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace diffractnet {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PropagationMethod parse_propagation_method(const std::string& name) {
    if (name == "sampled-rs") return PropagationMethod::SampledRS;
    if (name == "angular-spectrum") return PropagationMethod::AngularSpectrum;
    throw std::invalid_argument("unknown propagation method: " + name);
}

std::string to_string(PropagationMethod method) {
    return method == PropagationMethod::SampledRS ? "sampled-rs" : "angular-spectrum";
}

cdouble rs_impulse(double dx, double dy, double dz, double wavelength) {
    if (!(dz > 0.0)) throw std::invalid_argument("rs_impulse: dz must be positive");
    if (!(wavelength > 0.0)) throw std::invalid_argument("rs_impulse: wavelength must be positive");
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    const cdouble secondary{1.0 / (kTwoPi * r), -1.0 / wavelength}; // 1/(2 pi r) + 1/(j lambda)
    const double arg = kTwoPi * r / wavelength;
    return (dz / (r * r)) * secondary * cdouble{std::cos(arg), std::sin(arg)};
}

namespace {

// Padded impulse-response spectrum. Index a on the 2n axis encodes the signed
// displacement d = a for a < n and d = a - 2n for a > n (a == n is unused and
// left zero), so that circular convolution on the padded grid reproduces the
// linear convolution over displacements in [-(n-1), n-1].
ComplexField sampled_rs_transfer(const GridGeometry& g, double wavelength, double distance) {
    const int pnx = 2 * g.nx;
    const int pny = 2 * g.ny;
    ComplexField impulse(GridGeometry{pnx, pny, g.pitch});
    const double area = g.pitch * g.pitch;
    for (int b = 0; b < pny; ++b) {
        if (b == g.ny) continue;
        const int dyi = b < g.ny ? b : b - pny;
        for (int a = 0; a < pnx; ++a) {
            if (a == g.nx) continue;
            const int dxi = a < g.nx ? a : a - pnx;
            impulse.at(a, b) =
                area * rs_impulse(dxi * g.pitch, dyi * g.pitch, distance, wavelength);
        }
    }
    return fft2(impulse);
}

// fftfreq in cycles per length unit.
double spatial_frequency(int index, int n, double pitch) {
    const int k = index <= n / 2 ? index : index - n;
    return static_cast<double>(k) / (n * pitch);
}

ComplexField angular_spectrum_transfer(const GridGeometry& g, double wavelength, double distance) {
    ComplexField transfer(g);
    const double inv_lambda_sq = 1.0 / (wavelength * wavelength);
    for (int b = 0; b < g.ny; ++b) {
        const double fy = spatial_frequency(b, g.ny, g.pitch);
        for (int a = 0; a < g.nx; ++a) {
            const double fx = spatial_frequency(a, g.nx, g.pitch);
            const double kz_sq = inv_lambda_sq - fx * fx - fy * fy;
            if (kz_sq < 0.0) continue; // evanescent: hard zero
            const double phase = kTwoPi * distance * std::sqrt(kz_sq);
            transfer.at(a, b) = cdouble{std::cos(phase), std::sin(phase)};
        }
    }
    return transfer;
}

ComplexField pad_to(const ComplexField& u, const GridGeometry& padded) {
    ComplexField out(padded);
    const auto& g = u.geometry();
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) out.at(x, y) = u.at(x, y);
    return out;
}

ComplexField crop_to(const ComplexField& u, const GridGeometry& g) {
    ComplexField out(g);
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) out.at(x, y) = u.at(x, y);
    return out;
}

ComplexField apply_kernel(const ComplexField& field, const PropagationKernel& kernel,
                          bool conjugate) {
    if (field.geometry() != kernel.geometry())
        throw std::invalid_argument("propagate: field/kernel geometry mismatch");
    const auto& transfer = kernel.transfer();
    auto filter = [&](const ComplexField& u) {
        ComplexField spectrum = fft2(u);
        for (std::size_t i = 0; i < spectrum.size(); ++i)
            spectrum[i] *= conjugate ? std::conj(transfer[i]) : transfer[i];
        return ifft2(spectrum);
    };
    if (kernel.method() == PropagationMethod::AngularSpectrum) return filter(field);
    return crop_to(filter(pad_to(field, transfer.geometry())), field.geometry());
}

} // namespace

PropagationKernel build_kernel(const GridGeometry& geometry, double wavelength, double distance,
                               PropagationMethod method) {
    geometry.validate();
    if (!(wavelength > 0.0)) throw std::invalid_argument("build_kernel: wavelength must be positive");
    if (!(distance > 0.0)) throw std::invalid_argument("build_kernel: distance must be positive");
    PropagationKernel kernel;
    kernel.geom_ = geometry;
    kernel.wavelength_ = wavelength;
    kernel.distance_ = distance;
    kernel.method_ = method;
    kernel.transfer_ = method == PropagationMethod::SampledRS
                           ? sampled_rs_transfer(geometry, wavelength, distance)
                           : angular_spectrum_transfer(geometry, wavelength, distance);
    return kernel;
}

ComplexField propagate(const ComplexField& field, const PropagationKernel& kernel) {
    return apply_kernel(field, kernel, /*conjugate=*/false);
}

ComplexField propagate_adjoint(const ComplexField& grad, const PropagationKernel& kernel) {
    return apply_kernel(grad, kernel, /*conjugate=*/true);
}

ComplexField direct_sum_oracle(const ComplexField& field, double wavelength, double distance) {
    const auto& g = field.geometry();
    if (g.pixels() > 4096) throw std::invalid_argument("direct_sum_oracle: grid too large");
    const double area = g.pitch * g.pitch;
    ComplexField out(g);
    for (int oy = 0; oy < g.ny; ++oy)
        for (int ox = 0; ox < g.nx; ++ox) {
            cdouble acc{0.0, 0.0};
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix) {
                    const cdouble v = field.at(ix, iy);
                    if (v == cdouble{0.0, 0.0}) continue;
                    acc += area *
                           rs_impulse((ox - ix) * g.pitch, (oy - iy) * g.pitch, distance,
                                      wavelength) *
                           v;
                }
            out.at(ox, oy) = acc;
        }
    return out;
}

std::shared_ptr<const PropagationKernel> KernelCache::get(const GridGeometry& geometry,
                                                          double wavelength, double distance,
                                                          PropagationMethod method) {
    const Key key{geometry.nx, geometry.ny, geometry.pitch, wavelength, distance,
                  static_cast<int>(method)};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto kernel = std::make_shared<const PropagationKernel>(
        build_kernel(geometry, wavelength, distance, method));
    cache_.emplace(key, kernel);
    return kernel;
}

} // namespace diffractnet
