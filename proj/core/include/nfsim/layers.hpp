#pragma once

#include <cstddef>
#include <string>

#include "nfsim/tensor.hpp"

namespace nfsim {

// 2-D matrix helpers shared by the layer implementations. A [m,k] x B [k,n].
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T b, a: [k,m]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a b^T, b: [n,k]

// Every layer follows the same contract: forward(x) caches what the matching
// backward(grad_out) needs, backward returns the gradient with respect to x
// and accumulates parameter gradients into the owning ParamStore slots.
// Forward/backward pairs run per sample; batching averages gradients outside.

class Linear {
public:
    Linear(ParamStore& ps, const std::string& name, std::size_t d_in, std::size_t d_out,
           RandomStream& rng);

    Tensor forward(const Tensor& x);  // x: [T, d_in]
    Tensor backward(const Tensor& grad_out);

    std::size_t d_in() const { return d_in_; }
    std::size_t d_out() const { return d_out_; }

private:
    ParamStore::Slot* w_;
    ParamStore::Slot* b_;
    std::size_t d_in_, d_out_;
    Tensor x_;
};

class LayerNorm {
public:
    LayerNorm(ParamStore& ps, const std::string& name, std::size_t dim);

    Tensor forward(const Tensor& x);  // x: [T, dim]
    Tensor backward(const Tensor& grad_out);

private:
    ParamStore::Slot* gain_;
    ParamStore::Slot* shift_;
    std::size_t dim_;
    Tensor x_;
    std::vector<double> mean_, inv_std_;
    static constexpr double kEps = 1e-5;
};

// Row-wise softmax; shift-invariant and rows sum to one.
class SoftmaxRows {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& grad_out);

    // Stateless helpers usable outside the layer protocol.
    static Tensor apply(const Tensor& x);
    static Tensor grad(const Tensor& y, const Tensor& grad_out);

private:
    Tensor y_;
};

enum class ActivationKind { relu, sigmoid, tanh };

class Activation {
public:
    explicit Activation(ActivationKind kind) : kind_(kind) {}

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& grad_out);

    static double apply_scalar(ActivationKind kind, double x);

private:
    ActivationKind kind_;
    Tensor x_;
    Tensor y_;
};

// 1-D convolution over the leading (token) axis, stride 1, zero same-padding.
class Conv1d {
public:
    Conv1d(ParamStore& ps, const std::string& name, std::size_t c_in, std::size_t c_out,
           std::size_t kernel, RandomStream& rng);

    Tensor forward(const Tensor& x);  // x: [T, c_in] -> [T, c_out]
    Tensor backward(const Tensor& grad_out);

private:
    ParamStore::Slot* k_;  // [kernel, c_in, c_out]
    ParamStore::Slot* b_;  // [c_out]
    std::size_t c_in_, c_out_, kernel_;
    Tensor x_;
};

// Multi-head scaled dot-product self-attention with an output projection.
// No positional information is added here, so the layer is permutation
// equivariant by construction.
class Mhsa {
public:
    Mhsa(ParamStore& ps, const std::string& name, std::size_t d_model, std::size_t heads,
         std::size_t d_k, std::size_t d_v, RandomStream& rng);

    Tensor forward(const Tensor& x);  // x: [T, d_model]
    Tensor backward(const Tensor& grad_out);

private:
    ParamStore::Slot *wq_, *wk_, *wv_, *wo_;
    std::size_t d_model_, heads_, d_k_, d_v_;
    Tensor x_, q_, k_, v_, concat_;
    std::vector<Tensor> attn_;  // per-head attention weights [T, T]
};

// Mean over batch items of the squared error norm; batch = leading dimension
// for rank >= 2, a single item otherwise. grad = 2 (pred - target) / batch.
double mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad = nullptr);

// Binary cross-entropy with an epsilon guard inside the logarithms, averaged
// over all elements. pred entries must lie in (0, 1); labels in {0, 1}.
double bce_loss(const Tensor& pred, const Tensor& labels, double eps, Tensor* grad = nullptr);

} // namespace nfsim
