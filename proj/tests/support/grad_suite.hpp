#pragma once

// Test-only gradient verification suite. Each differentiable layer is checked
// against central finite differences on seeded random points; the suite stays
// independent of the training code paths it certifies.

#include <string>
#include <vector>

#include "nfsim/layers.hpp"
#include "nfsim/transformer.hpp"

namespace nfsim::testsupport {

struct GradResult {
    std::string layer;
    double worst = 0.0;
};

inline double project(const Tensor& y, const Tensor& r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += y.v[i] * r.v[i];
    return acc;
}

// Checks d(project(layer(x), r))/dx and the same derivative for every
// trainable parameter of the layer. Returns the worst relative error seen.
template <typename Layer>
double check_layer(Layer& layer, ParamStore& ps, const Tensor& x0, RandomStream& rng,
                   double h = 1e-5) {
    Tensor probe = gaussian_init(layer.forward(x0).shape, 1.0, rng);
    double worst = 0.0;

    ps.zero_grads();
    layer.forward(x0);
    const Tensor dx = layer.backward(probe);
    worst = std::max(worst, grad_check(
        [&](const Tensor& x) { return project(layer.forward(x), probe); }, x0, dx, h));

    for (std::size_t i = 0; i < ps.count(); ++i) {
        auto& slot = ps.slot(i);
        if (!slot.trainable) continue;
        ps.zero_grads();
        layer.forward(x0);
        layer.backward(probe);
        const Tensor analytic = slot.grad;
        const Tensor original = slot.value;
        const double err = grad_check(
            [&](const Tensor& w) {
                slot.value = w;
                return project(layer.forward(x0), probe);
            },
            original, analytic, h);
        slot.value = original;
        worst = std::max(worst, err);
    }
    return worst;
}

inline std::vector<GradResult> run_grad_suite(std::uint64_t seed, int points_per_layer) {
    std::vector<GradResult> results;
    RandomStream rng(seed, "grad-suite");

    auto record = [&](const std::string& name, double worst) {
        results.push_back({name, worst});
    };

    double worst;

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        ParamStore ps;
        Linear layer(ps, "lin", 4, 3, rng);
        const Tensor x = gaussian_init({5, 4}, 1.0, rng);
        worst = std::max(worst, check_layer(layer, ps, x, rng));
    }
    record("linear", worst);

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        ParamStore ps;
        LayerNorm layer(ps, "ln", 6);
        const Tensor x = gaussian_init({4, 6}, 1.0, rng);
        worst = std::max(worst, check_layer(layer, ps, x, rng));
    }
    record("layer_norm", worst);

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        ParamStore ps;
        SoftmaxRows layer;
        const Tensor x = gaussian_init({3, 5}, 1.0, rng);
        worst = std::max(worst, check_layer(layer, ps, x, rng));
    }
    record("softmax_rows", worst);

    for (auto [kind, name] : {std::pair{ActivationKind::relu, "relu"},
                              std::pair{ActivationKind::sigmoid, "sigmoid"},
                              std::pair{ActivationKind::tanh, "tanh"}}) {
        worst = 0.0;
        for (int p = 0; p < points_per_layer; ++p) {
            ParamStore ps;
            Activation layer(kind);
            // keep relu kinks away from the probe step
            Tensor x = gaussian_init({3, 4}, 1.0, rng);
            for (auto& v : x.v) {
                if (std::abs(v) < 1e-3) v = v < 0 ? v - 0.01 : v + 0.01;
            }
            worst = std::max(worst, check_layer(layer, ps, x, rng));
        }
        record(name, worst);
    }

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        ParamStore ps;
        Conv1d layer(ps, "conv", 3, 2, 3, rng);
        const Tensor x = gaussian_init({6, 3}, 1.0, rng);
        worst = std::max(worst, check_layer(layer, ps, x, rng));
    }
    record("conv1d", worst);

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        ParamStore ps;
        Mhsa layer(ps, "attn", 8, 2, 4, 4, rng);
        const Tensor x = gaussian_init({3, 8}, 1.0, rng);
        worst = std::max(worst, check_layer(layer, ps, x, rng));
    }
    record("mhsa", worst);

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        const Tensor pred = gaussian_init({2, 3}, 1.0, rng);
        const Tensor target = gaussian_init({2, 3}, 1.0, rng);
        Tensor analytic;
        mse_loss(pred, target, &analytic);
        worst = std::max(worst, grad_check(
            [&](const Tensor& x) { return mse_loss(x, target); }, pred, analytic, 1e-5));
    }
    record("mse_loss", worst);

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        Tensor pred({4});
        Tensor labels({4});
        for (std::size_t i = 0; i < 4; ++i) {
            pred.v[i] = rng.uniform(0.1, 0.9);
            labels.v[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
        }
        Tensor analytic;
        bce_loss(pred, labels, 1e-7, &analytic);
        worst = std::max(worst, grad_check(
            [&](const Tensor& x) { return bce_loss(x, labels, 1e-7); }, pred, analytic, 1e-5));
    }
    record("bce_loss", worst);

    worst = 0.0;
    for (int p = 0; p < points_per_layer; ++p) {
        ParamStore ps;
        EncoderBlock layer(ps, "enc", 6, 2, 3, 3, rng);
        const Tensor x = gaussian_init({3, 6}, 1.0, rng);
        worst = std::max(worst, check_layer(layer, ps, x, rng));
    }
    record("encoder_block", worst);

    return results;
}

} // namespace nfsim::testsupport
