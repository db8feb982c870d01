#pragma once

#include <cstddef>
#include <vector>

#include "nfsim/scenario.hpp"
#include "nfsim/transformer.hpp"

namespace nfsim {

// Frame stacks enter as patches of size P x P with the F frames stacked
// channel-wise, so each patch vector has P*P*F entries laid out channel-major
// (all pixels of frame 0, then frame 1, ...).
Tensor patchify(const FrameSequence& seq, std::size_t patch);

// Common surface for the two blockage predictors. forward returns per-UE
// probabilities; the train path exposes the probability tensor and a matching
// backward for loss gradients.
class BlockagePredictor {
public:
    virtual ~BlockagePredictor() = default;

    virtual Tensor forward_probs(const FrameSequence& seq) = 0;  // [1, K] in (0,1)
    virtual void backward_probs(const Tensor& grad) = 0;
    virtual ParamStore& params() = 0;

    std::vector<double> forward(const FrameSequence& seq);
};

struct VitConfig {
    std::size_t embed_dim = 768;
    std::size_t blocks = 12;
    std::size_t heads = 12;
    std::size_t patch = 16;
    std::vector<std::size_t> mlp_hidden{512, 256, 128};
    std::size_t frame_h = 32;
    std::size_t frame_w = 32;
    std::size_t frames = 10;
    std::size_t num_ues = 1;

    std::size_t patches() const { return (frame_h / patch) * (frame_w / patch); }
    std::size_t head_dim() const { return embed_dim / heads; }
};

// Patch-based predictor with a class token: patch embedding, learnable
// positional embeddings over N_p + 1 tokens, encoder blocks, then
// LayerNorm -> MLP -> sigmoid on the class-token state.
class VitLite : public BlockagePredictor {
public:
    VitLite(const VitConfig& cfg, RandomStream& rng);

    Tensor forward_probs(const FrameSequence& seq) override;
    void backward_probs(const Tensor& grad) override;
    ParamStore& params() override { return ps_; }

    const VitConfig& config() const { return cfg_; }

private:
    VitConfig cfg_;
    ParamStore ps_;
    Linear embed_;
    ParamStore::Slot* class_token_;
    ParamStore::Slot* pos_;
    TransformerEncoder encoder_;
    LayerNorm head_norm_;
    std::vector<Linear> mlp_;
    std::vector<Activation> mlp_acts_;
    Linear out_;
    Activation sigmoid_;
    std::size_t token_count_ = 0;
};

// Baseline without patches: one token per frame (the flattened frame), an
// encoder, mean pooling, and the same MLP/sigmoid head.
class FrameTokenTransformer : public BlockagePredictor {
public:
    FrameTokenTransformer(const VitConfig& cfg, RandomStream& rng);

    Tensor forward_probs(const FrameSequence& seq) override;
    void backward_probs(const Tensor& grad) override;
    ParamStore& params() override { return ps_; }

private:
    VitConfig cfg_;
    ParamStore ps_;
    Linear embed_;
    ParamStore::Slot* pos_;
    TransformerEncoder encoder_;
    LayerNorm head_norm_;
    std::vector<Linear> mlp_;
    std::vector<Activation> mlp_acts_;
    Linear out_;
    Activation sigmoid_;
    std::size_t token_count_ = 0;
};

struct VitTrainCurve {
    std::vector<double> epoch_loss;
};

// Adam/BCE training; labels are the per-UE availability bits of the samples.
VitTrainCurve train_vit(BlockagePredictor& model, const std::vector<LabeledSample>& data,
                        const std::vector<std::size_t>& train_indices, std::size_t epochs,
                        std::size_t batch, double lr, double bce_eps,
                        RandomStream& shuffle_rng);

struct ClassificationMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Positive class = label 1, predicted positive when prob >= threshold.
ClassificationMetrics classification_metrics(const std::vector<double>& probs,
                                             const std::vector<int>& labels,
                                             double threshold = 0.5);

// Metrics for the blocked class over (sample, UE) pairs: a pair is positive
// when the LoS link is unavailable and the prediction is 1 - p_available.
ClassificationMetrics evaluate_blocked_f1(BlockagePredictor& model,
                                          const std::vector<LabeledSample>& data,
                                          const std::vector<std::size_t>& indices,
                                          double threshold = 0.5);

// Median number of frames between the first sustained threshold crossing of
// the blocked-probability series and each event frame.
double lead_time(const std::vector<double>& blocked_prob,
                 const std::vector<std::size_t>& event_frames, double threshold);

} // namespace nfsim
