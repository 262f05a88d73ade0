#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tcpd/common.hpp"

namespace tcpd {

// Planar multi-channel image: channel-major, each plane h*w contiguous.
template <typename T>
class Image {
public:
    Image() = default;
    Image(int channels, int height, int width, T fill = T(0))
        : c_(channels), h_(height), w_(width),
          data_(static_cast<size_t>(channels) * height * width, fill) {
        if (channels < 0 || height < 0 || width < 0)
            throw InvalidInput("Image: negative dimension");
    }

    int channels() const { return c_; }
    int height() const { return h_; }
    int width() const { return w_; }
    size_t plane_size() const { return static_cast<size_t>(h_) * w_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    T* plane(int c) { return data_.data() + static_cast<size_t>(c) * plane_size(); }
    const T* plane(int c) const { return data_.data() + static_cast<size_t>(c) * plane_size(); }

    T& at(int c, int y, int x) { return data_[idx(c, y, x)]; }
    T at(int c, int y, int x) const { return data_[idx(c, y, x)]; }

    bool same_shape(const Image& o) const {
        return c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
    }

    template <typename U>
    Image<U> cast() const {
        Image<U> out(c_, h_, w_);
        for (size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
        return out;
    }

    bool all_finite() const {
        for (const T& v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

private:
    size_t idx(int c, int y, int x) const {
        return (static_cast<size_t>(c) * h_ + y) * w_ + x;
    }

    int c_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
};

template <typename T>
void require_same_shape(const Image<T>& a, const Image<T>& b, const char* what) {
    if (!a.same_shape(b)) throw InvalidInput(std::string(what) + ": shape mismatch");
}

}  // namespace tcpd
