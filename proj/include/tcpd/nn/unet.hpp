#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tcpd/nn/ops.hpp"

namespace tcpd::nn {

// Refinement-network hyperparameters. Channel widths double per level;
// decoding uses nearest-neighbor upsampling + conv and concatenated
// encoder skips; a final 1x1 projection maps back to the output channels.
struct ArchitectureSpec {
    int levels = 3;
    int base_channels = 32;
    int kernel_size = 3;
    std::string activation = "relu";  // "relu" or "leaky_relu"
    bool global_residual = true;

    void validate() const;
    double negative_slope() const;
    std::string to_json() const;
    static ArchitectureSpec from_json(const std::string& text);
    bool operator==(const ArchitectureSpec&) const = default;
};

// Input spatial sizes must be divisible by 2^levels.
template <typename T>
class UNet {
public:
    UNet() = default;
    UNet(const ArchitectureSpec& spec, int in_channels, int out_channels);

    // He-normal weights; the final projection starts at zero when
    // zero_init_final is set, making the initial refinement the identity
    // over its additive base.
    void init(Rng& rng, bool zero_init_final = true);

    struct Ctx {
        std::vector<Tensor<T>> conv_in;  // per conv, forward order
        std::vector<Tensor<T>> skips;    // encoder skip activations
        Tensor<T> bott_out;              // bottleneck activation output
        std::vector<Tensor<T>> dec_out;  // decoder stage outputs (i > 0)
    };

    Tensor<T> forward(const Tensor<T>& x, Ctx& ctx, Workspace<T>& ws) const;

    // Accumulates into grads (shapes are created on first use) and returns
    // the gradient with respect to the network input.
    Tensor<T> backward(const Tensor<T>& dout, const Ctx& ctx,
                       std::vector<ConvGrads<T>>& grads, Workspace<T>& ws) const;

    const ArchitectureSpec& spec() const { return spec_; }
    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    size_t parameter_count() const;

    std::vector<ConvParams<T>>& convs() { return convs_; }
    const std::vector<ConvParams<T>>& convs() const { return convs_; }

private:
    int width(int level) const { return spec_.base_channels << level; }

    ArchitectureSpec spec_;
    int in_ch_ = 0, out_ch_ = 0;
    std::vector<ConvParams<T>> convs_;
    // conv index bookkeeping (filled at construction)
    std::vector<int> enc_a_, enc_b_, up_, dec_a_, dec_b_;
    int bott_a_ = -1, bott_b_ = -1, proj_ = -1;
};

}  // namespace tcpd::nn
