#pragma once

#include "diffractnet/data.hpp"
#include "diffractnet/field.hpp"
#include "diffractnet/rng.hpp"

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

namespace dntest {

using namespace diffractnet;

inline ComplexField random_field(const GridGeometry& g, std::uint64_t seed) {
    Rng rng(seed);
    ComplexField u(g);
    for (auto& v : u.values()) v = cdouble{rng.gaussian(), rng.gaussian()};
    return u;
}

inline double max_abs_diff(const ComplexField& a, const ComplexField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

/// <a, b> = sum conj(a_i) * b_i.
inline cdouble inner(const ComplexField& a, const ComplexField& b) {
    cdouble s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            path_ = base / ("diffractnet_test_" + std::to_string(::getpid()) + "_" +
                            std::to_string(counter_++) );
            std::error_code ec;
            if (std::filesystem::create_directory(path_, ec)) break;
            if (i > 100) throw std::runtime_error("cannot create temp dir");
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

/// Synthetic stand-in for an MNIST-style dataset: each class is a bright
/// square whose position depends on the class, plus per-sample noise.
/// Linearly separable enough for short smoke-training runs.
inline Dataset synthetic_dataset(std::size_t samples, int num_classes, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.num_classes = num_classes;
    ds.images.resize(samples * 28 * 28);
    ds.labels.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const int label = static_cast<int>(rng.below(num_classes));
        ds.labels[i] = static_cast<std::uint8_t>(label);
        std::uint8_t* img = ds.images.data() + i * 28 * 28;
        for (int p = 0; p < 28 * 28; ++p)
            img[p] = static_cast<std::uint8_t>(rng.below(32));
        const int gx = label % 4;
        const int gy = label / 4;
        const int x0 = 2 + gx * 6;
        const int y0 = 2 + gy * 6;
        for (int y = y0; y < y0 + 5; ++y)
            for (int x = x0; x < x0 + 5; ++x)
                img[y * 28 + x] = static_cast<std::uint8_t>(200 + rng.below(56));
    }
    return ds;
}

} // namespace dntest
