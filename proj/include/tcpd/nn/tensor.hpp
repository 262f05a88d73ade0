#pragma once

#include <cstddef>
#include <vector>

#include "tcpd/image.hpp"

namespace tcpd::nn {

// Activation tensor for a batch of images, laid out channel-major over the
// whole batch: row c is n*h*w contiguous values, sample n at offset n*h*w.
// This layout makes a convolution one GEMM per layer for the entire batch
// and channel concatenation a plain row stack.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    Tensor(int channels, int samples, int height, int width, T fill = T(0))
        : c_(channels), n_(samples), h_(height), w_(width),
          data_(static_cast<size_t>(channels) * samples * height * width, fill) {}

    int channels() const { return c_; }
    int samples() const { return n_; }
    int height() const { return h_; }
    int width() const { return w_; }
    size_t row_size() const { return static_cast<size_t>(n_) * h_ * w_; }
    size_t plane_size() const { return static_cast<size_t>(h_) * w_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    T* row(int c) { return data_.data() + static_cast<size_t>(c) * row_size(); }
    const T* row(int c) const { return data_.data() + static_cast<size_t>(c) * row_size(); }
    T* plane(int c, int n) { return row(c) + static_cast<size_t>(n) * plane_size(); }
    const T* plane(int c, int n) const { return row(c) + static_cast<size_t>(n) * plane_size(); }

    bool same_shape(const Tensor& o) const {
        return c_ == o.c_ && n_ == o.n_ && h_ == o.h_ && w_ == o.w_;
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    // Copy one sample's planes into an Image (channels match rows).
    Image<T> to_image(int n) const {
        Image<T> img(c_, h_, w_);
        for (int c = 0; c < c_; ++c)
            std::copy(plane(c, n), plane(c, n) + plane_size(), img.plane(c));
        return img;
    }

    void set_sample(int n, const Image<T>& img) {
        for (int c = 0; c < c_; ++c)
            std::copy(img.plane(c), img.plane(c) + plane_size(), plane(c, n));
    }

private:
    int c_ = 0, n_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
};

}  // namespace tcpd::nn
