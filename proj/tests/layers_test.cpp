#include "diffractnet/layers.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <numbers>

using namespace diffractnet;
using namespace dntest;

namespace {

ModulationParams random_params(const GridGeometry& g, std::uint64_t seed, bool amp_trainable,
                               bool bias) {
    auto p = ModulationParams::identity(g, amp_trainable, bias);
    Rng rng(seed);
    for (auto& phi : p.phase) phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (amp_trainable)
        for (auto& a : p.amplitude) a = rng.uniform(0.2, 1.8);
    if (bias) p.bias = cdouble{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    return p;
}

// Scalar loss used for finite-difference checks: L = sum |h - target|^2.
double local_loss(const ComplexField& h, const ComplexField& target) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += std::norm(h[i] - target[i]);
    return s;
}

ComplexField local_loss_grad(const ComplexField& h, const ComplexField& target) {
    ComplexField g(h.geometry());
    for (std::size_t i = 0; i < h.size(); ++i) g[i] = 2.0 * (h[i] - target[i]);
    return g;
}

} // namespace

TEST_CASE("modulate identity and sign flip") {
    const GridGeometry g{6, 6, 1.0};
    const auto z = random_field(g, 11);
    auto p = ModulationParams::identity(g, false, false);
    CHECK(max_abs_diff(modulate(z, p), z) == 0.0);

    for (auto& phi : p.phase) phi = std::numbers::pi;
    const auto flipped = modulate(z, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        worst = std::max(worst, std::abs(flipped[i] + z[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("modulus of modulated field equals amplitude times input modulus") {
    const GridGeometry g{6, 6, 1.0};
    const auto z = random_field(g, 12);
    const auto p = random_params(g, 13, true, false);
    const auto h = modulate(z, p);
    for (std::size_t i = 0; i < z.size(); ++i)
        CHECK(std::abs(h[i]) ==
              doctest::Approx(p.amplitude[i] * std::abs(z[i])).epsilon(1e-12));
}

TEST_CASE("modulate is strictly pixelwise") {
    const GridGeometry g{5, 5, 1.0};
    const auto p = random_params(g, 14, true, false);
    const auto z = random_field(g, 15);
    auto z2 = z;
    z2.at(2, 3) += cdouble{0.25, -0.1};
    const auto h = modulate(z, p);
    const auto h2 = modulate(z2, p);
    for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
            if (x == 2 && y == 3)
                CHECK(std::abs(h2.at(x, y) - h.at(x, y)) > 0.0);
            else
                CHECK(h2.at(x, y) == h.at(x, y));
        }
}

TEST_CASE("modulate rejects geometry mismatch") {
    const auto p = ModulationParams::identity(GridGeometry{4, 4, 1.0}, false, false);
    CHECK_THROWS_AS(modulate(random_field(GridGeometry{5, 4, 1.0}, 1), p),
                    std::invalid_argument);
}

TEST_CASE("trainable parameter counts match the layer mode") {
    const GridGeometry g{8, 8, 1.0};
    CHECK(ModulationParams::identity(g, false, false).trainable_count() == 64);
    CHECK(ModulationParams::identity(g, true, false).trainable_count() == 128);
    CHECK(ModulationParams::identity(g, true, true).trainable_count() == 130);
}

TEST_CASE("modulate_backward basics") {
    const GridGeometry g{6, 6, 1.0};
    const auto z = random_field(g, 20);
    const auto p = random_params(g, 21, true, true);

    SUBCASE("zero upstream gradient gives zero gradients") {
        const auto r = modulate_backward(ComplexField(g), z, p);
        CHECK(total_energy(r.grad_z) == 0.0);
        for (double v : r.grads.d_phase) CHECK(v == 0.0);
        for (double v : r.grads.d_amplitude) CHECK(v == 0.0);
        CHECK(r.grads.d_bias == cdouble{0.0, 0.0});
    }

    SUBCASE("identity modulation passes the gradient through") {
        const auto id = ModulationParams::identity(g, false, false);
        const auto gh = random_field(g, 22);
        const auto r = modulate_backward(gh, z, id);
        CHECK(max_abs_diff(r.grad_z, gh) == 0.0);
    }

    SUBCASE("shape mismatch throws") {
        CHECK_THROWS_AS(modulate_backward(random_field(GridGeometry{4, 4, 1.0}, 1), z, p),
                        std::invalid_argument);
    }
}

TEST_CASE("modulate_backward agrees with central finite differences") {
    const GridGeometry g{6, 6, 1.0};
    const double eps = 1e-6;
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        auto p = random_params(g, seed, true, true);
        const auto z = random_field(g, seed + 100);
        const auto target = random_field(g, seed + 200);
        const double scale = 1.0;

        const auto h = modulate(z, p, scale);
        const auto r = modulate_backward(local_loss_grad(h, target), z, p, scale);

        Rng rng(seed + 300);
        auto check_entry = [&](double* param, double analytic) {
            const double saved = *param;
            *param = saved + eps;
            const double lp = local_loss(modulate(z, p, scale), target);
            *param = saved - eps;
            const double lm = local_loss(modulate(z, p, scale), target);
            *param = saved;
            const double numeric = (lp - lm) / (2.0 * eps);
            CHECK(std::abs(analytic - numeric) /
                      std::max({std::abs(analytic), std::abs(numeric), 1e-12}) <
                  1e-4);
        };
        for (int t = 0; t < 20; ++t) {
            const std::size_t i = rng.below(g.pixels());
            check_entry(&p.phase[i], r.grads.d_phase[i]);
            check_entry(&p.amplitude[i], r.grads.d_amplitude[i]);
        }
        // bias (real then imaginary part)
        {
            const cdouble saved = p.bias;
            p.bias = saved + cdouble{eps, 0.0};
            const double lp = local_loss(modulate(z, p, scale), target);
            p.bias = saved - cdouble{eps, 0.0};
            const double lm = local_loss(modulate(z, p, scale), target);
            p.bias = saved;
            CHECK(std::abs(r.grads.d_bias.real() - (lp - lm) / (2.0 * eps)) /
                      std::max(std::abs(r.grads.d_bias.real()), 1e-12) <
                  1e-4);
            p.bias = saved + cdouble{0.0, eps};
            const double lpi = local_loss(modulate(z, p, scale), target);
            p.bias = saved - cdouble{0.0, eps};
            const double lmi = local_loss(modulate(z, p, scale), target);
            p.bias = saved;
            CHECK(std::abs(r.grads.d_bias.imag() - (lpi - lmi) / (2.0 * eps)) /
                      std::max(std::abs(r.grads.d_bias.imag()), 1e-12) <
                  1e-4);
        }
    }
}

TEST_CASE("grad_z finite-difference agreement") {
    // Perturbing the real and imaginary parts of one input pixel must match
    // the carried dL/dRe + j dL/dIm convention.
    const GridGeometry g{5, 5, 1.0};
    auto p = random_params(g, 40, true, false);
    auto z = random_field(g, 41);
    const auto target = random_field(g, 42);
    const auto r = modulate_backward(local_loss_grad(modulate(z, p), target), z, p);
    const double eps = 1e-6;
    for (std::size_t i : {0ul, 7ul, 24ul}) {
        const cdouble saved = z[i];
        z[i] = saved + cdouble{eps, 0.0};
        const double lp = local_loss(modulate(z, p), target);
        z[i] = saved - cdouble{eps, 0.0};
        const double lm = local_loss(modulate(z, p), target);
        z[i] = saved;
        CHECK(std::abs(r.grad_z[i].real() - (lp - lm) / (2.0 * eps)) < 1e-6);
        z[i] = saved + cdouble{0.0, eps};
        const double lpi = local_loss(modulate(z, p), target);
        z[i] = saved - cdouble{0.0, eps};
        const double lmi = local_loss(modulate(z, p), target);
        z[i] = saved;
        CHECK(std::abs(r.grad_z[i].imag() - (lpi - lmi) / (2.0 * eps)) < 1e-6);
    }
}
