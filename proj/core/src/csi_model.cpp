#include "nfsim/csi_model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nfsim {

RayDataset make_ray_dataset(const ArrayGeometry& bs, const WorldBounds& region,
                            std::size_t n_samples, double wavelength, RandomStream& rng) {
    RayDataset data;
    data.tokens = bs.size();
    data.samples.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Position3 ue{rng.uniform(region.lo.x, region.hi.x),
                           rng.uniform(region.lo.y, region.hi.y),
                           rng.uniform(region.lo.z, region.hi.z)};
        RaySample s;
        s.features = features_to_tensor(geometric_features(bs, ue));
        auto h = los_channel(bs, ue, wavelength);
        // Reference the carrier phase to the array center.
        const Complex derotate = std::polar(1.0, 2.0 * M_PI * distance(bs.center, ue) / wavelength);
        for (auto& x : h) x *= derotate;
        s.target = std::move(h);
        data.samples.push_back(std::move(s));
    }
    return data;
}

Tensor features_to_tensor(const GeometricFeatures& f) {
    Tensor t({f.count(), 3});
    t.v = f.values;
    return t;
}

Tensor complex_to_head(const ComplexVector& h) {
    Tensor t({1, 2 * h.size()});
    for (std::size_t i = 0; i < h.size(); ++i) {
        t.v[i] = h[i].real();
        t.v[h.size() + i] = h[i].imag();
    }
    return t;
}

ComplexVector head_to_complex(const Tensor& t) {
    const std::size_t n = t.size() / 2;
    ComplexVector h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = {t.v[i], t.v[n + i]};
    return h;
}

double nmse(const ComplexVector& est, const ComplexVector& truth) {
    if (est.size() != truth.size()) throw std::invalid_argument("nmse: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        num += std::norm(est[i] - truth[i]);
        den += std::norm(truth[i]);
    }
    if (den <= 0.0) throw std::invalid_argument("nmse: zero reference");
    return num / den;
}

GeometricFeatures noisy_feature_injection(const GeometricFeatures& f, double snr_db,
                                          RandomStream& rng) {
    if (std::isinf(snr_db) && snr_db > 0.0) return f;
    double power = 0.0;
    for (double v : f.values) power += v * v;
    power /= static_cast<double>(f.values.size());
    const double snr = std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(power / snr);
    GeometricFeatures out = f;
    for (double& v : out.values) v += sigma * rng.gaussian();
    return out;
}

CsiEstimatorBase::CsiEstimatorBase(std::size_t tokens) : tokens_(tokens) {
    Tensor mean({3});
    Tensor scale({3});
    scale.fill(1.0);
    Tensor tscale({1});
    tscale.fill(1.0);
    feat_mean_ = ps_.add("norm.feature_mean", std::move(mean), /*trainable=*/false);
    feat_scale_ = ps_.add("norm.feature_scale", std::move(scale), /*trainable=*/false);
    target_scale_ = ps_.add("norm.target_scale", std::move(tscale), /*trainable=*/false);
}

Tensor CsiEstimatorBase::standardized(const Tensor& features) const {
    Tensor x = features;
    for (std::size_t t = 0; t < x.dim(0); ++t) {
        for (std::size_t j = 0; j < 3; ++j) {
            x.at(t, j) = (x.at(t, j) - feat_mean_->value.at(j)) / feat_scale_->value.at(j);
        }
    }
    return x;
}

ComplexVector CsiEstimatorBase::estimate(const GeometricFeatures& f) {
    const Tensor out = forward_train(features_to_tensor(f));
    Tensor unscaled = out;
    const double s = target_scale();
    for (auto& v : unscaled.v) v /= s;
    return head_to_complex(unscaled);
}

void CsiEstimatorBase::calibrate(const RayDataset& data, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw std::invalid_argument("calibrate: empty index set");
    double mean[3] = {0, 0, 0};
    double sq[3] = {0, 0, 0};
    std::size_t count = 0;
    double target_power = 0.0;
    std::size_t target_count = 0;
    for (auto idx : indices) {
        const auto& s = data.samples[idx];
        for (std::size_t t = 0; t < s.features.dim(0); ++t) {
            for (std::size_t j = 0; j < 3; ++j) {
                mean[j] += s.features.at(t, j);
                sq[j] += s.features.at(t, j) * s.features.at(t, j);
            }
            ++count;
        }
        for (const auto& x : s.target) {
            target_power += std::norm(x);
            ++target_count;
        }
    }
    for (std::size_t j = 0; j < 3; ++j) {
        mean[j] /= static_cast<double>(count);
        const double var = sq[j] / static_cast<double>(count) - mean[j] * mean[j];
        feat_mean_->value.at(j) = mean[j];
        feat_scale_->value.at(j) = std::sqrt(std::max(var, 1e-12));
    }
    const double rms = std::sqrt(target_power / (2.0 * static_cast<double>(target_count)));
    target_scale_->value.v[0] = rms > 0.0 ? 1.0 / rms : 1.0;
}

CsiTransformer::CsiTransformer(const CsiModelConfig& cfg, RandomStream& rng)
    : CsiEstimatorBase(cfg.tokens),
      cfg_(cfg),
      embed_(ps_, "embed", 3, cfg.d_model, rng),
      pos_(ps_.add("pos", gaussian_init({cfg.tokens, cfg.d_model}, 0.02, rng))),
      encoder_(ps_, "encoder", cfg.layers, cfg.d_model, cfg.heads, cfg.d_k, cfg.d_v, rng),
      head_(ps_, "head", cfg.d_model, 2 * cfg.tokens, rng) {}

Tensor CsiTransformer::forward_train(const Tensor& features) {
    if (features.rank() != 2 || features.dim(1) != 3) {
        throw std::invalid_argument("CsiTransformer: features must be [N, 3]");
    }
    if (features.dim(0) != cfg_.tokens) {
        throw std::invalid_argument("CsiTransformer: token count does not match positional table");
    }
    cached_tokens_ = features.dim(0);
    Tensor h = embed_.forward(standardized(features));
    for (std::size_t i = 0; i < h.size(); ++i) h.v[i] += pos_->value.v[i];
    h = encoder_.forward(h);

    Tensor pooled({1, cfg_.d_model});
    for (std::size_t t = 0; t < cached_tokens_; ++t) {
        for (std::size_t j = 0; j < cfg_.d_model; ++j) pooled.at(0, j) += h.at(t, j);
    }
    const double inv = 1.0 / static_cast<double>(cached_tokens_);
    for (auto& v : pooled.v) v *= inv;
    pooled_cache_ = pooled;
    return head_.forward(pooled);
}

void CsiTransformer::backward_train(const Tensor& grad) {
    const Tensor dpooled = head_.backward(grad);
    Tensor dtokens({cached_tokens_, cfg_.d_model});
    const double inv = 1.0 / static_cast<double>(cached_tokens_);
    for (std::size_t t = 0; t < cached_tokens_; ++t) {
        for (std::size_t j = 0; j < cfg_.d_model; ++j) dtokens.at(t, j) = dpooled.at(0, j) * inv;
    }
    Tensor denc = encoder_.backward(dtokens);
    for (std::size_t i = 0; i < denc.size(); ++i) pos_->grad.v[i] += denc.v[i];
    embed_.backward(denc);
}

CnnCsiModel::CnnCsiModel(const CnnCsiConfig& cfg, RandomStream& rng)
    : CsiEstimatorBase(cfg.tokens),
      cfg_(cfg),
      dense1_(ps_, "dense1", cfg.tokens * cfg.filters.back(), cfg.dense_hidden, rng),
      dense_act_(ActivationKind::relu),
      dense2_(ps_, "dense2", cfg.dense_hidden, 2 * cfg.tokens, rng) {
    std::size_t c_in = 3;
    for (std::size_t i = 0; i < cfg.filters.size(); ++i) {
        convs_.emplace_back(ps_, "conv" + std::to_string(i), c_in, cfg.filters[i], cfg.kernel, rng);
        conv_acts_.emplace_back(ActivationKind::relu);
        c_in = cfg.filters[i];
    }
}

Tensor CnnCsiModel::forward_train(const Tensor& features) {
    if (features.rank() != 2 || features.dim(1) != 3) {
        throw std::invalid_argument("CnnCsiModel: features must be [N, 3]");
    }
    if (features.dim(0) != cfg_.tokens) {
        throw std::invalid_argument("CnnCsiModel: token count mismatch");
    }
    cached_tokens_ = features.dim(0);
    Tensor h = standardized(features);
    for (std::size_t i = 0; i < convs_.size(); ++i) {
        h = conv_acts_[i].forward(convs_[i].forward(h));
    }
    Tensor flat({1, h.size()});
    flat.v = h.v;
    return dense2_.forward(dense_act_.forward(dense1_.forward(flat)));
}

void CnnCsiModel::backward_train(const Tensor& grad) {
    Tensor dflat = dense1_.backward(dense_act_.backward(dense2_.backward(grad)));
    Tensor dh({cached_tokens_, cfg_.filters.back()});
    dh.v = dflat.v;
    for (std::size_t i = convs_.size(); i-- > 0;) {
        dh = convs_[i].backward(conv_acts_[i].backward(dh));
    }
}

TrainCurve train_csi(CsiEstimatorBase& model, const RayDataset& data,
                     const std::vector<std::size_t>& train_indices, std::size_t epochs,
                     std::size_t batch, double lr, RandomStream& shuffle_rng) {
    if (train_indices.empty()) throw std::invalid_argument("train_csi: empty training set");
    if (batch < 1) throw std::invalid_argument("train_csi: batch must be >= 1");

    model.calibrate(data, train_indices);
    AdamState opt(model.params(), AdamConfig{.lr = lr});

    // Pre-scale the targets once.
    const double tscale = model.target_scale();
    std::vector<Tensor> scaled_targets;
    scaled_targets.reserve(data.samples.size());
    for (const auto& s : data.samples) {
        Tensor t = complex_to_head(s.target);
        for (auto& v : t.v) v *= tscale;
        scaled_targets.push_back(std::move(t));
    }

    TrainCurve curve;
    curve.epoch_loss.reserve(epochs);
    std::vector<std::size_t> order(train_indices);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        // Fisher-Yates shuffle via the dedicated stream.
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
                const auto& sample = data.samples[order[i]];
                const Tensor pred = model.forward_train(sample.features);
                Tensor grad;
                batch_loss += mse_loss(pred, scaled_targets[order[i]], &grad);
                for (auto& g : grad.v) g *= inv_b;
                model.backward_train(grad);
            }
            batch_loss *= inv_b;
            if (!std::isfinite(batch_loss)) {
                throw std::runtime_error("train_csi: non-finite loss at epoch " +
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

double mean_nmse(CsiEstimatorBase& model, const RayDataset& data,
                 const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw std::invalid_argument("mean_nmse: empty index set");
    double acc = 0.0;
    for (auto idx : indices) {
        const auto& s = data.samples[idx];
        GeometricFeatures f;
        f.values = s.features.v;
        acc += nmse(model.estimate(f), s.target);
    }
    return acc / static_cast<double>(indices.size());
}

SplitIndices split_indices(std::size_t n, double train_frac, double val_frac,
                           RandomStream& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        std::swap(order[i - 1], order[j < i ? j : i - 1]);
    }
    SplitIndices split;
    const auto n_train = static_cast<std::size_t>(train_frac * static_cast<double>(n));
    const auto n_val = static_cast<std::size_t>(val_frac * static_cast<double>(n));
    split.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
    split.val.assign(order.begin() + static_cast<long>(n_train),
                     order.begin() + static_cast<long>(n_train + n_val));
    split.test.assign(order.begin() + static_cast<long>(n_train + n_val), order.end());
    return split;
}

} // namespace nfsim
