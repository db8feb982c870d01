#pragma once

#include <cstddef>
#include <vector>

#include "nfsim/channel.hpp"
#include "nfsim/scenario.hpp"
#include "nfsim/transformer.hpp"

namespace nfsim {

// (features, channel) training pair. Targets carry the carrier phase
// referenced to the array center: the global propagation phase shared by all
// elements is removed, which beamforming metrics are invariant to, leaving a
// smooth geometry-to-channel map.
struct RaySample {
    Tensor features;       // [N, 3]: distance, elevation, azimuth per element
    ComplexVector target;  // length N
};

struct RayDataset {
    std::vector<RaySample> samples;
    std::size_t tokens = 0;  // N
};

RayDataset make_ray_dataset(const ArrayGeometry& bs, const WorldBounds& region,
                            std::size_t n_samples, double wavelength, RandomStream& rng);

Tensor features_to_tensor(const GeometricFeatures& f);
// Real head convention: first N entries real parts, next N imaginary parts.
Tensor complex_to_head(const ComplexVector& h);
ComplexVector head_to_complex(const Tensor& t);

// ||est - truth||^2 / ||truth||^2
double nmse(const ComplexVector& est, const ComplexVector& truth);

// Adds zero-mean Gaussian noise scaled so the perturbation power matches the
// stated SNR against the feature power; +infinity leaves features untouched.
GeometricFeatures noisy_feature_injection(const GeometricFeatures& f, double snr_db,
                                          RandomStream& rng);

// Shared base: feature/target normalization constants live in non-trainable
// parameter slots so checkpoints carry them and forward stays a pure function
// of (input, params).
class CsiEstimatorBase {
public:
    virtual ~CsiEstimatorBase() = default;

    virtual Tensor forward_train(const Tensor& features) = 0;  // -> [1, 2N] scaled
    virtual void backward_train(const Tensor& grad) = 0;

    ParamStore& params() { return ps_; }
    const ParamStore& params() const { return ps_; }
    std::size_t tokens() const { return tokens_; }

    // Physical-unit estimate for one UE.
    ComplexVector estimate(const GeometricFeatures& f);

    // Fixes normalization constants from a dataset (feature mean/scale per
    // column, target RMS scale). Called once before training.
    void calibrate(const RayDataset& data, const std::vector<std::size_t>& indices);

    Tensor standardized(const Tensor& features) const;
    double target_scale() const { return target_scale_->value.v[0]; }

protected:
    CsiEstimatorBase(std::size_t tokens);

    ParamStore ps_;
    std::size_t tokens_;
    ParamStore::Slot* feat_mean_;
    ParamStore::Slot* feat_scale_;
    ParamStore::Slot* target_scale_;
};

struct CsiModelConfig {
    std::size_t d_model = 512;
    std::size_t layers = 6;
    std::size_t heads = 8;
    std::size_t d_k = 64;
    std::size_t d_v = 64;
    std::size_t tokens = 1024;  // N, the BS antenna count
};

// Token-per-antenna encoder: linear embedding plus learnable positional
// encodings, L pre-norm blocks, mean pooling, and a 2N-real output head.
class CsiTransformer : public CsiEstimatorBase {
public:
    CsiTransformer(const CsiModelConfig& cfg, RandomStream& rng);

    Tensor forward_train(const Tensor& features) override;
    void backward_train(const Tensor& grad) override;

    const CsiModelConfig& config() const { return cfg_; }

private:
    CsiModelConfig cfg_;
    Linear embed_;
    ParamStore::Slot* pos_;
    TransformerEncoder encoder_;
    Linear head_;
    Tensor pooled_cache_;
    std::size_t cached_tokens_ = 0;
};

struct CnnCsiConfig {
    std::vector<std::size_t> filters{64, 128, 256};
    std::size_t kernel = 3;
    std::size_t dense_hidden = 128;
    std::size_t tokens = 1024;
};

// Convolutional baseline: 1-D convs over the antenna axis, then dense layers.
class CnnCsiModel : public CsiEstimatorBase {
public:
    CnnCsiModel(const CnnCsiConfig& cfg, RandomStream& rng);

    Tensor forward_train(const Tensor& features) override;
    void backward_train(const Tensor& grad) override;

private:
    CnnCsiConfig cfg_;
    std::vector<Conv1d> convs_;
    std::vector<Activation> conv_acts_;
    Linear dense1_;
    Activation dense_act_;
    Linear dense2_;
    std::size_t cached_tokens_ = 0;
};

struct TrainCurve {
    std::vector<double> epoch_loss;
};

// Adam/MSE training over scaled targets. Calibrates normalization from the
// given indices first; throws on NaN loss with epoch diagnostics.
TrainCurve train_csi(CsiEstimatorBase& model, const RayDataset& data,
                     const std::vector<std::size_t>& train_indices, std::size_t epochs,
                     std::size_t batch, double lr, RandomStream& shuffle_rng);

double mean_nmse(CsiEstimatorBase& model, const RayDataset& data,
                 const std::vector<std::size_t>& indices);

// Deterministic shuffled split by fractions (e.g. 80/10/10).
struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};
SplitIndices split_indices(std::size_t n, double train_frac, double val_frac,
                           RandomStream& rng);

} // namespace nfsim
