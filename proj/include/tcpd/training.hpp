#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "tcpd/dataset.hpp"
#include "tcpd/losses.hpp"
#include "tcpd/model.hpp"
#include "tcpd/nn/adam.hpp"
#include "tcpd/rng.hpp"

namespace tcpd {

struct TrainConfig {
    int patch_size = 64;
    int images_per_batch = 6;
    int patches_per_image = 4;
    double learning_rate = 1e-4;
    long long iterations = 200000;
    double alpha = 4.0;
    uint64_t seed = 0;
    std::string loss_mode = "cp_ycbcr";  // "cp" | "cp_ycbcr"
    std::string method = "tcpdnet";      // "tcpdnet" | "single_step"
    nn::ArchitectureSpec arch;
    long long log_every = 100;
    long long val_every = 1000;  // validation + checkpoint cadence

    void validate() const;
    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
    bool operator==(const TrainConfig&) const = default;
};

// Spatially rotate all 12 channels clockwise by 90k degrees, then permute
// the orientation channels so the stored quad stays physically consistent:
// odd k maps [I0, I45, I90, I135] -> [I90, I135, I0, I45], even k leaves
// the order unchanged.
template <typename T>
Image<T> augment_rotation(const Image<T>& cube12, int k);

template <typename T>
struct TrainSample {
    CpfaRaw<T> raw;
    Image<T> truth;
};

// Six distinct scenes, four patches each: crop at offsets = 0 (mod 4),
// rotate the ground truth, then synthesize the raw patch.
template <typename T>
std::vector<TrainSample<T>> sample_batch(const std::vector<const SceneRecord*>& train_scenes,
                                         const TrainConfig& cfg, const CpfaPattern& pattern,
                                         Rng& rng);

// Everything the forward/backward pass keeps between stages.
template <typename T>
struct BatchWork {
    nn::Tensor<T> color_in, color_out, color_tgt;
    nn::Tensor<T> polar_in, polar_out, polar_tgt;
    typename nn::UNet<T>::Ctx color_ctx, polar_ctx;
    nn::Workspace<T> ws;
    std::vector<nn::ConvGrads<T>> color_grads, polar_grads, joint_grads;
};

template <typename T>
void forward_batch(const DemosaickModel<T>& model, const std::vector<TrainSample<T>>& batch,
                   BatchWork<T>& work);

template <typename T>
LossBreakdown<T> batch_loss_values(const DemosaickModel<T>& model, const BatchWork<T>& work,
                                   T alpha, const std::string& loss_mode);

// Forward + losses + gradients (grads zeroed first). Returns the breakdown.
template <typename T>
LossBreakdown<T> loss_and_gradients(const DemosaickModel<T>& model,
                                    const std::vector<TrainSample<T>>& batch, T alpha,
                                    const std::string& loss_mode, BatchWork<T>& work);

// One optimization step; throws NumericError (naming the batch seed) if the
// loss goes non-finite.
LossBreakdown<float> train_step(DemosaickModel<float>& model,
                                const std::vector<TrainSample<float>>& batch,
                                nn::Adam<float>& opt, const TrainConfig& cfg,
                                BatchWork<float>& work, uint64_t batch_seed = 0);

struct TrainResult {
    std::string final_checkpoint;
    std::string best_checkpoint;
    double best_val_s0_cpsnr = 0.0;
    long long best_iteration = 0;
};

// Full loop: seeded batches, periodic validation on the val split (S0 CPSNR),
// best/final checkpoints under out_dir, JSON-lines log to `log` when given.
TrainResult train_loop(const TrainConfig& cfg, const std::vector<SceneRecord>& scenes,
                       const std::string& out_dir, std::ostream* log = nullptr,
                       const std::function<void(long long, const LossBreakdown<float>&)>&
                           progress = nullptr);

// Mean S0 CPSNR of the model against the given scenes.
double validation_s0_cpsnr(const DemosaickModel<float>& model,
                           const std::vector<const SceneRecord*>& scenes);

}  // namespace tcpd
