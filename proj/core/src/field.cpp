#include "diffractnet/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace diffractnet {

void GridGeometry::validate() const {
    if (nx < 2 || ny < 2)
        throw std::invalid_argument("GridGeometry: nx and ny must be >= 2");
    if (!(pitch > 0.0) || !std::isfinite(pitch))
        throw std::invalid_argument("GridGeometry: pitch must be positive and finite");
}

ComplexField::ComplexField(const GridGeometry& geometry, cdouble fill) : geom_(geometry) {
    geom_.validate();
    values_.assign(geom_.pixels(), fill);
}

RealMap::RealMap(const GridGeometry& geometry, double fill) : geom_(geometry) {
    geom_.validate();
    values_.assign(geom_.pixels(), fill);
}

ComplexField make_field(const GridGeometry& geometry, cdouble fill) {
    return ComplexField(geometry, fill);
}

namespace {

// Plans are cached per (ny, nx, sign) and executed on caller buffers via
// fftw_execute_dft. FFTW_UNALIGNED keeps the plan valid for any array.
// Plan creation is not thread-safe in FFTW, hence the mutex.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void execute(int nx, int ny, int sign, const cdouble* in, cdouble* out) {
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto key = std::make_tuple(ny, nx, sign);
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                std::vector<cdouble> a(static_cast<std::size_t>(nx) * ny);
                std::vector<cdouble> b(a.size());
                plan = fftw_plan_dft_2d(ny, nx, reinterpret_cast<fftw_complex*>(a.data()),
                                        reinterpret_cast<fftw_complex*>(b.data()), sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
                if (!plan) throw std::runtime_error("fft2: FFTW plan creation failed");
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        // Out-of-place execution on distinct buffers is thread-safe.
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

} // namespace

ComplexField fft2(const ComplexField& field) {
    const auto& g = field.geometry();
    ComplexField out(g);
    PlanCache::instance().execute(g.nx, g.ny, FFTW_FORWARD, field.values().data(),
                                  out.values().data());
    return out;
}

ComplexField ifft2(const ComplexField& spectrum) {
    const auto& g = spectrum.geometry();
    ComplexField out(g);
    PlanCache::instance().execute(g.nx, g.ny, FFTW_BACKWARD, spectrum.values().data(),
                                  out.values().data());
    const double scale = 1.0 / static_cast<double>(g.pixels());
    for (auto& v : out.values()) v *= scale;
    return out;
}

ComplexField elementwise_mul(const ComplexField& a, const ComplexField& b) {
    if (a.geometry() != b.geometry())
        throw std::invalid_argument("elementwise_mul: geometry mismatch");
    ComplexField out(a.geometry());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

double total_energy(const ComplexField& field) {
    double sum = 0.0;
    for (const auto& v : field.values()) sum += std::norm(v);
    return sum;
}

RealMap modulus(const ComplexField& field) {
    RealMap out(field.geometry());
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = std::abs(field[i]);
    return out;
}

} // namespace diffractnet
