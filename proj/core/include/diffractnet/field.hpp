#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace diffractnet {

using cdouble = std::complex<double>;

/// Sampling grid shared by fields, kernels and modulation layers.
/// `pitch` is the pixel spacing in the same length unit as the wavelength.
struct GridGeometry {
    int nx = 0;
    int ny = 0;
    double pitch = 0.0;

    bool operator==(const GridGeometry&) const = default;

    std::size_t pixels() const { return static_cast<std::size_t>(nx) * ny; }

    /// Throws std::invalid_argument unless nx >= 2, ny >= 2, pitch > 0.
    void validate() const;
};

/// 2D grid of complex amplitudes. Storage is row-major with x fastest:
/// index = iy * nx + ix.
class ComplexField {
public:
    ComplexField() = default;
    ComplexField(const GridGeometry& geometry, cdouble fill = cdouble{0.0, 0.0});

    const GridGeometry& geometry() const { return geom_; }
    std::size_t size() const { return values_.size(); }

    cdouble& operator[](std::size_t i) { return values_[i]; }
    const cdouble& operator[](std::size_t i) const { return values_[i]; }

    cdouble& at(int ix, int iy) { return values_[static_cast<std::size_t>(iy) * geom_.nx + ix]; }
    const cdouble& at(int ix, int iy) const {
        return values_[static_cast<std::size_t>(iy) * geom_.nx + ix];
    }

    std::vector<cdouble>& values() { return values_; }
    const std::vector<cdouble>& values() const { return values_; }

private:
    GridGeometry geom_;
    std::vector<cdouble> values_;
};

/// Nonnegative real-valued map on a grid (modulus images, merged channels).
class RealMap {
public:
    RealMap() = default;
    RealMap(const GridGeometry& geometry, double fill = 0.0);

    const GridGeometry& geometry() const { return geom_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    const double& operator[](std::size_t i) const { return values_[i]; }

    double& at(int ix, int iy) { return values_[static_cast<std::size_t>(iy) * geom_.nx + ix]; }
    const double& at(int ix, int iy) const {
        return values_[static_cast<std::size_t>(iy) * geom_.nx + ix];
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

private:
    GridGeometry geom_;
    std::vector<double> values_;
};

ComplexField make_field(const GridGeometry& geometry, cdouble fill = cdouble{0.0, 0.0});

/// Unnormalized forward 2D DFT.
ComplexField fft2(const ComplexField& field);

/// Inverse 2D DFT with 1/(nx*ny) scaling, so ifft2(fft2(u)) == u.
ComplexField ifft2(const ComplexField& spectrum);

/// Pixelwise complex product. Throws on geometry mismatch.
ComplexField elementwise_mul(const ComplexField& a, const ComplexField& b);

/// Sum of |u|^2 over all pixels.
double total_energy(const ComplexField& field);

/// Pixelwise |u|.
RealMap modulus(const ComplexField& field);

} // namespace diffractnet
