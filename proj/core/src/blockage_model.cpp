#include "nfsim/blockage_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nfsim {

Tensor patchify(const FrameSequence& seq, std::size_t patch) {
    if (patch < 1 || seq.height % patch != 0 || seq.width % patch != 0) {
        throw std::invalid_argument("patchify: frame size not divisible by patch size");
    }
    const std::size_t rows = seq.height / patch;
    const std::size_t cols = seq.width / patch;
    const std::size_t np = rows * cols;
    const std::size_t dim = patch * patch * seq.frames;
    Tensor out({np, dim});
    for (std::size_t pr = 0; pr < rows; ++pr) {
        for (std::size_t pc = 0; pc < cols; ++pc) {
            const std::size_t p = pr * cols + pc;
            for (std::size_t f = 0; f < seq.frames; ++f) {
                for (std::size_t r = 0; r < patch; ++r) {
                    for (std::size_t c = 0; c < patch; ++c) {
                        out.at(p, f * patch * patch + r * patch + c) =
                            seq.at(f, pr * patch + r, pc * patch + c);
                    }
                }
            }
        }
    }
    return out;
}

std::vector<double> BlockagePredictor::forward(const FrameSequence& seq) {
    const Tensor probs = forward_probs(seq);
    return probs.v;
}

VitLite::VitLite(const VitConfig& cfg, RandomStream& rng)
    : cfg_(cfg),
      embed_(ps_, "embed", cfg.patch * cfg.patch * cfg.frames, cfg.embed_dim, rng),
      class_token_(ps_.add("class_token", gaussian_init({cfg.embed_dim}, 0.02, rng))),
      pos_(ps_.add("pos", gaussian_init({cfg.patches() + 1, cfg.embed_dim}, 0.02, rng))),
      encoder_(ps_, "encoder", cfg.blocks, cfg.embed_dim, cfg.heads, cfg.head_dim(),
               cfg.head_dim(), rng),
      head_norm_(ps_, "head_norm", cfg.embed_dim),
      out_(
          [&]() -> ParamStore& {
              std::size_t d = cfg.embed_dim;
              for (std::size_t i = 0; i < cfg.mlp_hidden.size(); ++i) {
                  mlp_.emplace_back(ps_, "head.mlp" + std::to_string(i), d, cfg.mlp_hidden[i], rng);
                  mlp_acts_.emplace_back(ActivationKind::relu);
                  d = cfg.mlp_hidden[i];
              }
              return ps_;
          }(),
          "head.out", cfg.mlp_hidden.empty() ? cfg.embed_dim : cfg.mlp_hidden.back(),
          cfg.num_ues, rng),
      sigmoid_(ActivationKind::sigmoid) {}

Tensor VitLite::forward_probs(const FrameSequence& seq) {
    if (seq.frames != cfg_.frames || seq.height != cfg_.frame_h || seq.width != cfg_.frame_w) {
        throw std::invalid_argument("VitLite: frame sequence shape mismatch");
    }
    const Tensor patches = patchify(seq, cfg_.patch);
    const Tensor embedded = embed_.forward(patches);
    token_count_ = patches.dim(0) + 1;

    Tensor tokens({token_count_, cfg_.embed_dim});
    for (std::size_t j = 0; j < cfg_.embed_dim; ++j) tokens.at(0, j) = class_token_->value.at(j);
    for (std::size_t t = 1; t < token_count_; ++t) {
        for (std::size_t j = 0; j < cfg_.embed_dim; ++j) tokens.at(t, j) = embedded.at(t - 1, j);
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) tokens.v[i] += pos_->value.v[i];

    const Tensor encoded = encoder_.forward(tokens);
    Tensor cls({1, cfg_.embed_dim});
    for (std::size_t j = 0; j < cfg_.embed_dim; ++j) cls.at(0, j) = encoded.at(0, j);

    Tensor h = head_norm_.forward(cls);
    for (std::size_t i = 0; i < mlp_.size(); ++i) h = mlp_acts_[i].forward(mlp_[i].forward(h));
    return sigmoid_.forward(out_.forward(h));
}

void VitLite::backward_probs(const Tensor& grad) {
    Tensor g = out_.backward(sigmoid_.backward(grad));
    for (std::size_t i = mlp_.size(); i-- > 0;) {
        g = mlp_[i].backward(mlp_acts_[i].backward(g));
    }
    const Tensor dcls = head_norm_.backward(g);

    Tensor denc({token_count_, cfg_.embed_dim});
    for (std::size_t j = 0; j < cfg_.embed_dim; ++j) denc.at(0, j) = dcls.at(0, j);
    const Tensor dtokens = encoder_.backward(denc);

    for (std::size_t i = 0; i < dtokens.size(); ++i) pos_->grad.v[i] += dtokens.v[i];
    for (std::size_t j = 0; j < cfg_.embed_dim; ++j) class_token_->grad.at(j) += dtokens.at(0, j);

    Tensor dpatches({token_count_ - 1, cfg_.embed_dim});
    for (std::size_t t = 1; t < token_count_; ++t) {
        for (std::size_t j = 0; j < cfg_.embed_dim; ++j) dpatches.at(t - 1, j) = dtokens.at(t, j);
    }
    embed_.backward(dpatches);
}

FrameTokenTransformer::FrameTokenTransformer(const VitConfig& cfg, RandomStream& rng)
    : cfg_(cfg),
      embed_(ps_, "embed", cfg.frame_h * cfg.frame_w, cfg.embed_dim, rng),
      pos_(ps_.add("pos", gaussian_init({cfg.frames, cfg.embed_dim}, 0.02, rng))),
      encoder_(ps_, "encoder", cfg.blocks, cfg.embed_dim, cfg.heads, cfg.head_dim(),
               cfg.head_dim(), rng),
      head_norm_(ps_, "head_norm", cfg.embed_dim),
      out_(
          [&]() -> ParamStore& {
              std::size_t d = cfg.embed_dim;
              for (std::size_t i = 0; i < cfg.mlp_hidden.size(); ++i) {
                  mlp_.emplace_back(ps_, "head.mlp" + std::to_string(i), d, cfg.mlp_hidden[i], rng);
                  mlp_acts_.emplace_back(ActivationKind::relu);
                  d = cfg.mlp_hidden[i];
              }
              return ps_;
          }(),
          "head.out", cfg.mlp_hidden.empty() ? cfg.embed_dim : cfg.mlp_hidden.back(),
          cfg.num_ues, rng),
      sigmoid_(ActivationKind::sigmoid) {}

Tensor FrameTokenTransformer::forward_probs(const FrameSequence& seq) {
    if (seq.frames != cfg_.frames || seq.height != cfg_.frame_h || seq.width != cfg_.frame_w) {
        throw std::invalid_argument("FrameTokenTransformer: frame sequence shape mismatch");
    }
    token_count_ = seq.frames;
    Tensor tokens({token_count_, seq.frame_size()});
    tokens.v = seq.values;
    Tensor h = embed_.forward(tokens);
    for (std::size_t i = 0; i < h.size(); ++i) h.v[i] += pos_->value.v[i];
    h = encoder_.forward(h);

    Tensor pooled({1, cfg_.embed_dim});
    for (std::size_t t = 0; t < token_count_; ++t) {
        for (std::size_t j = 0; j < cfg_.embed_dim; ++j) pooled.at(0, j) += h.at(t, j);
    }
    for (auto& v : pooled.v) v /= static_cast<double>(token_count_);

    Tensor g = head_norm_.forward(pooled);
    for (std::size_t i = 0; i < mlp_.size(); ++i) g = mlp_acts_[i].forward(mlp_[i].forward(g));
    return sigmoid_.forward(out_.forward(g));
}

void FrameTokenTransformer::backward_probs(const Tensor& grad) {
    Tensor g = out_.backward(sigmoid_.backward(grad));
    for (std::size_t i = mlp_.size(); i-- > 0;) {
        g = mlp_[i].backward(mlp_acts_[i].backward(g));
    }
    const Tensor dpooled = head_norm_.backward(g);

    Tensor dtokens({token_count_, cfg_.embed_dim});
    const double inv = 1.0 / static_cast<double>(token_count_);
    for (std::size_t t = 0; t < token_count_; ++t) {
        for (std::size_t j = 0; j < cfg_.embed_dim; ++j) {
            dtokens.at(t, j) = dpooled.at(0, j) * inv;
        }
    }
    Tensor denc = encoder_.backward(dtokens);
    for (std::size_t i = 0; i < denc.size(); ++i) pos_->grad.v[i] += denc.v[i];
    embed_.backward(denc);
}

VitTrainCurve train_vit(BlockagePredictor& model, const std::vector<LabeledSample>& data,
                        const std::vector<std::size_t>& train_indices, std::size_t epochs,
                        std::size_t batch, double lr, double bce_eps,
                        RandomStream& shuffle_rng) {
    if (train_indices.empty()) throw std::invalid_argument("train_vit: empty training set");
    if (batch < 1) throw std::invalid_argument("train_vit: batch must be >= 1");

    AdamState opt(model.params(), AdamConfig{.lr = lr});
    VitTrainCurve curve;
    curve.epoch_loss.reserve(epochs);
    std::vector<std::size_t> order(train_indices);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.uniform() * static_cast<double>(i));
            std::swap(order[i - 1], order[j < i ? j : i - 1]);
        }
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(start + batch, order.size());
            const double inv_b = 1.0 / static_cast<double>(stop - start);
            model.params().zero_grads();
            double batch_loss = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const auto& sample = data[order[i]];
                const Tensor probs = model.forward_probs(sample.frames);
                Tensor labels({1, sample.labels.size()});
                for (std::size_t k = 0; k < sample.labels.size(); ++k) {
                    labels.at(0, k) = static_cast<double>(sample.labels[k]);
                }
                Tensor grad;
                batch_loss += bce_loss(probs, labels, bce_eps, &grad);
                for (auto& g : grad.v) g *= inv_b;
                model.backward_probs(grad);
            }
            batch_loss *= inv_b;
            if (!std::isfinite(batch_loss)) {
                throw std::runtime_error("train_vit: non-finite loss at epoch " +
                                         std::to_string(epoch));
            }
            opt.step(model.params());
            epoch_loss += batch_loss * static_cast<double>(stop - start);
            seen += stop - start;
        }
        curve.epoch_loss.push_back(epoch_loss / static_cast<double>(seen));
    }
    return curve;
}

ClassificationMetrics classification_metrics(const std::vector<double>& probs,
                                             const std::vector<int>& labels,
                                             double threshold) {
    if (probs.size() != labels.size()) {
        throw std::invalid_argument("classification_metrics: size mismatch");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const bool predicted = probs[i] >= threshold;
        const bool actual = labels[i] == 1;
        if (predicted && actual) ++tp;
        if (predicted && !actual) ++fp;
        if (!predicted && actual) ++fn;
    }
    ClassificationMetrics m;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

ClassificationMetrics evaluate_blocked_f1(BlockagePredictor& model,
                                          const std::vector<LabeledSample>& data,
                                          const std::vector<std::size_t>& indices,
                                          double threshold) {
    std::vector<double> blocked_probs;
    std::vector<int> blocked_labels;
    for (auto idx : indices) {
        const auto& s = data[idx];
        const auto probs = model.forward(s.frames);
        for (std::size_t k = 0; k < s.labels.size(); ++k) {
            blocked_probs.push_back(1.0 - probs[k]);
            blocked_labels.push_back(1 - s.labels[k]);
        }
    }
    return classification_metrics(blocked_probs, blocked_labels, threshold);
}

double lead_time(const std::vector<double>& blocked_prob,
                 const std::vector<std::size_t>& event_frames, double threshold) {
    if (event_frames.empty()) throw std::invalid_argument("lead_time: no events");
    std::vector<double> leads;
    leads.reserve(event_frames.size());
    for (auto e : event_frames) {
        std::size_t lead = 0;
        while (lead < e && blocked_prob[e - 1 - lead] >= threshold) ++lead;
        leads.push_back(static_cast<double>(lead));
    }
    std::sort(leads.begin(), leads.end());
    const std::size_t n = leads.size();
    return n % 2 == 1 ? leads[n / 2] : 0.5 * (leads[n / 2 - 1] + leads[n / 2]);
}

} // namespace nfsim
