#pragma once

#include <string>
#include <vector>

#include "tcpd/nn/tensor.hpp"
#include "tcpd/rng.hpp"

namespace tcpd::nn {

// Scratch buffers shared across layers; sized to the largest layer seen.
template <typename T>
struct Workspace {
    std::vector<T> col;
    T* col_buffer(size_t elems) {
        if (col.size() < elems) col.resize(elems);
        return col.data();
    }
};

// Stride-1 "same" convolution with zero padding (kernel 3 or 1 here).
// Weights are (out_ch, in_ch, k, k) row-major, bias per out channel.
template <typename T>
struct ConvParams {
    std::string name;
    int in_ch = 0, out_ch = 0, k = 1;
    std::vector<T> w;
    std::vector<T> b;

    size_t weight_count() const { return w.size(); }
    size_t param_count() const { return w.size() + b.size(); }

    void init_he(Rng& rng, double negative_slope);
    void init_zero();
};

template <typename T>
struct ConvGrads {
    std::vector<T> gw;
    std::vector<T> gb;
    void zero() {
        std::fill(gw.begin(), gw.end(), T(0));
        std::fill(gb.begin(), gb.end(), T(0));
    }
};

template <typename T>
Tensor<T> conv2d_forward(const ConvParams<T>& p, const Tensor<T>& x, Workspace<T>& ws);

// Accumulates parameter gradients into g and returns the input gradient.
template <typename T>
Tensor<T> conv2d_backward(const ConvParams<T>& p, const Tensor<T>& x, const Tensor<T>& dy,
                          ConvGrads<T>& g, Workspace<T>& ws);

// In-place activation; negative_slope 0 gives plain ReLU.
template <typename T>
void activation_forward(Tensor<T>& x, double negative_slope);

// In-place: d *= act'(y) recovered from the activation output y.
template <typename T>
void activation_backward(Tensor<T>& d, const T* act_out, double negative_slope);

template <typename T>
Tensor<T> avgpool2_forward(const Tensor<T>& x);

template <typename T>
Tensor<T> avgpool2_backward(const Tensor<T>& dy);

template <typename T>
Tensor<T> upsample2_forward(const Tensor<T>& x);

template <typename T>
Tensor<T> upsample2_backward(const Tensor<T>& dy);

// Row-stack along channels.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
void split_channels(const Tensor<T>& d, int first_channels, Tensor<T>& da, Tensor<T>& db);

template <typename T>
void add_inplace(Tensor<T>& dst, const Tensor<T>& src);

}  // namespace tcpd::nn
