#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nfsim/layers.hpp"

namespace nfsim {

// Pre-norm residual encoder block:
//   u = x + MHSA(LN1(x));  y = u + W2 relu(W1 LN2(u))
// with a feed-forward hidden width of 4 * d_model.
class EncoderBlock {
public:
    EncoderBlock(ParamStore& ps, const std::string& name, std::size_t d_model,
                 std::size_t heads, std::size_t d_k, std::size_t d_v, RandomStream& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& grad_out);

private:
    LayerNorm ln1_, ln2_;
    Mhsa attn_;
    Linear ff1_, ff2_;
    Activation relu_;
};

class TransformerEncoder {
public:
    TransformerEncoder(ParamStore& ps, const std::string& name, std::size_t layers,
                       std::size_t d_model, std::size_t heads, std::size_t d_k,
                       std::size_t d_v, RandomStream& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& grad_out);

private:
    std::vector<std::unique_ptr<EncoderBlock>> blocks_;
};

} // namespace nfsim
