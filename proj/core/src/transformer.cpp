#include "nfsim/transformer.hpp"

namespace nfsim {

EncoderBlock::EncoderBlock(ParamStore& ps, const std::string& name, std::size_t d_model,
                           std::size_t heads, std::size_t d_k, std::size_t d_v,
                           RandomStream& rng)
    : ln1_(ps, name + ".ln1", d_model),
      ln2_(ps, name + ".ln2", d_model),
      attn_(ps, name + ".attn", d_model, heads, d_k, d_v, rng),
      ff1_(ps, name + ".ff1", d_model, 4 * d_model, rng),
      ff2_(ps, name + ".ff2", 4 * d_model, d_model, rng),
      relu_(ActivationKind::relu) {}

Tensor EncoderBlock::forward(const Tensor& x) {
    Tensor u = attn_.forward(ln1_.forward(x));
    for (std::size_t i = 0; i < u.size(); ++i) u.v[i] += x.v[i];
    Tensor f = ff2_.forward(relu_.forward(ff1_.forward(ln2_.forward(u))));
    for (std::size_t i = 0; i < f.size(); ++i) f.v[i] += u.v[i];
    return f;
}

Tensor EncoderBlock::backward(const Tensor& grad_out) {
    // Feed-forward branch plus residual passthrough.
    Tensor du = ln2_.backward(ff1_.backward(relu_.backward(ff2_.backward(grad_out))));
    for (std::size_t i = 0; i < du.size(); ++i) du.v[i] += grad_out.v[i];
    // Attention branch plus residual passthrough.
    Tensor dx = ln1_.backward(attn_.backward(du));
    for (std::size_t i = 0; i < dx.size(); ++i) dx.v[i] += du.v[i];
    return dx;
}

TransformerEncoder::TransformerEncoder(ParamStore& ps, const std::string& name,
                                       std::size_t layers, std::size_t d_model,
                                       std::size_t heads, std::size_t d_k, std::size_t d_v,
                                       RandomStream& rng) {
    blocks_.reserve(layers);
    for (std::size_t i = 0; i < layers; ++i) {
        blocks_.push_back(std::make_unique<EncoderBlock>(
            ps, name + ".block" + std::to_string(i), d_model, heads, d_k, d_v, rng));
    }
}

Tensor TransformerEncoder::forward(const Tensor& x) {
    Tensor h = x;
    for (auto& b : blocks_) h = b->forward(h);
    return h;
}

Tensor TransformerEncoder::backward(const Tensor& grad_out) {
    Tensor g = grad_out;
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) g = (*it)->backward(g);
    return g;
}

} // namespace nfsim
