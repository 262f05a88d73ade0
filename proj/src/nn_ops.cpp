#include "tcpd/nn/ops.hpp"

#include <cblas.h>

#include <cmath>
#include <cstring>

namespace tcpd::nn {

namespace {

inline void gemm(bool ta, bool tb, int m, int n, int k, float alpha, const float* a, int lda,
                 const float* b, int ldb, float beta, float* c, int ldc) {
    cblas_sgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans,
                m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

inline void gemm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, int lda,
                 const double* b, int ldb, double beta, double* c, int ldc) {
    cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans,
                m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

// col has one row per (ci, ky, kx) tap, one column per output position.
template <typename T>
void im2col(const Tensor<T>& x, int k, T* col) {
    const int h = x.height(), w = x.width(), n = x.samples(), p = k / 2;
    const size_t hw = x.plane_size();
    const size_t cols = x.row_size();
    for (int ci = 0; ci < x.channels(); ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                T* dst_row = col + (static_cast<size_t>((ci * k + ky) * k + kx)) * cols;
                const int oy = ky - p, ox = kx - p;
                const int x_lo = std::max(0, -ox), x_hi = std::min(w, w - ox);
                for (int ni = 0; ni < n; ++ni) {
                    const T* src_plane = x.plane(ci, ni);
                    T* dst_plane = dst_row + static_cast<size_t>(ni) * hw;
                    for (int y = 0; y < h; ++y) {
                        T* dst = dst_plane + static_cast<size_t>(y) * w;
                        const int sy = y + oy;
                        if (sy < 0 || sy >= h || x_lo >= x_hi) {
                            std::memset(dst, 0, sizeof(T) * w);
                            continue;
                        }
                        if (x_lo > 0) std::memset(dst, 0, sizeof(T) * x_lo);
                        std::memcpy(dst + x_lo, src_plane + static_cast<size_t>(sy) * w + x_lo + ox,
                                    sizeof(T) * (x_hi - x_lo));
                        if (x_hi < w) std::memset(dst + x_hi, 0, sizeof(T) * (w - x_hi));
                    }
                }
            }
        }
    }
}

// Scatter of im2col: accumulate tap gradients back onto input positions.
template <typename T>
void col2im_accumulate(const T* col, int channels, int k, Tensor<T>& dx) {
    const int h = dx.height(), w = dx.width(), n = dx.samples(), p = k / 2;
    const size_t hw = dx.plane_size();
    const size_t cols = dx.row_size();
    for (int ci = 0; ci < channels; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const T* src_row = col + (static_cast<size_t>((ci * k + ky) * k + kx)) * cols;
                const int oy = ky - p, ox = kx - p;
                const int x_lo = std::max(0, -ox), x_hi = std::min(w, w - ox);
                if (x_lo >= x_hi) continue;
                for (int ni = 0; ni < n; ++ni) {
                    T* dst_plane = dx.plane(ci, ni);
                    const T* src_plane = src_row + static_cast<size_t>(ni) * hw;
                    for (int y = 0; y < h; ++y) {
                        const int sy = y + oy;
                        if (sy < 0 || sy >= h) continue;
                        const T* src = src_plane + static_cast<size_t>(y) * w + x_lo;
                        T* dst = dst_plane + static_cast<size_t>(sy) * w + x_lo + ox;
                        for (int i = 0; i < x_hi - x_lo; ++i) dst[i] += src[i];
                    }
                }
            }
        }
    }
}

}  // namespace

template <typename T>
void ConvParams<T>::init_he(Rng& rng, double negative_slope) {
    w.assign(static_cast<size_t>(out_ch) * in_ch * k * k, T(0));
    b.assign(out_ch, T(0));
    const double fan_in = static_cast<double>(in_ch) * k * k;
    const double stddev = std::sqrt(2.0 / ((1.0 + negative_slope * negative_slope) * fan_in));
    for (T& v : w) v = static_cast<T>(stddev * rng.normal());
}

template <typename T>
void ConvParams<T>::init_zero() {
    w.assign(static_cast<size_t>(out_ch) * in_ch * k * k, T(0));
    b.assign(out_ch, T(0));
}

template <typename T>
Tensor<T> conv2d_forward(const ConvParams<T>& p, const Tensor<T>& x, Workspace<T>& ws) {
    if (x.channels() != p.in_ch)
        throw InvalidInput("conv2d: input channels " + std::to_string(x.channels()) +
                           " != " + std::to_string(p.in_ch) + " (" + p.name + ")");
    const int kk = p.k * p.k;
    const size_t cols = x.row_size();
    Tensor<T> y(p.out_ch, x.samples(), x.height(), x.width());
    const T* mat = x.data();
    if (p.k != 1) {
        T* col = ws.col_buffer(static_cast<size_t>(p.in_ch) * kk * cols);
        im2col(x, p.k, col);
        mat = col;
    }
    gemm(false, false, p.out_ch, static_cast<int>(cols), p.in_ch * kk, T(1), p.w.data(),
         p.in_ch * kk, mat, static_cast<int>(cols), T(0), y.data(), static_cast<int>(cols));
    for (int co = 0; co < p.out_ch; ++co) {
        T* row = y.row(co);
        const T bias = p.b[co];
        for (size_t i = 0; i < cols; ++i) row[i] += bias;
    }
    return y;
}

template <typename T>
Tensor<T> conv2d_backward(const ConvParams<T>& p, const Tensor<T>& x, const Tensor<T>& dy,
                          ConvGrads<T>& g, Workspace<T>& ws) {
    const int kk = p.k * p.k;
    const int K = p.in_ch * kk;
    const size_t cols = x.row_size();
    if (g.gw.size() != p.w.size()) g.gw.assign(p.w.size(), T(0));
    if (g.gb.size() != p.b.size()) g.gb.assign(p.b.size(), T(0));

    // dW += dY * col(x)^T
    if (p.k != 1) {
        T* col = ws.col_buffer(static_cast<size_t>(K) * cols);
        im2col(x, p.k, col);
        gemm(false, true, p.out_ch, K, static_cast<int>(cols), T(1), dy.data(),
             static_cast<int>(cols), col, static_cast<int>(cols), T(1), g.gw.data(), K);
    } else {
        gemm(false, true, p.out_ch, K, static_cast<int>(cols), T(1), dy.data(),
             static_cast<int>(cols), x.data(), static_cast<int>(cols), T(1), g.gw.data(), K);
    }
    for (int co = 0; co < p.out_ch; ++co) {
        const T* row = dy.row(co);
        T acc = T(0);
        for (size_t i = 0; i < cols; ++i) acc += row[i];
        g.gb[co] += acc;
    }

    // dX = col2im(W^T * dY)
    Tensor<T> dx(p.in_ch, x.samples(), x.height(), x.width());
    if (p.k != 1) {
        T* dcol = ws.col_buffer(static_cast<size_t>(K) * cols);
        gemm(true, false, K, static_cast<int>(cols), p.out_ch, T(1), p.w.data(), K, dy.data(),
             static_cast<int>(cols), T(0), dcol, static_cast<int>(cols));
        col2im_accumulate(dcol, p.in_ch, p.k, dx);
    } else {
        gemm(true, false, K, static_cast<int>(cols), p.out_ch, T(1), p.w.data(), K, dy.data(),
             static_cast<int>(cols), T(0), dx.data(), static_cast<int>(cols));
    }
    return dx;
}

template <typename T>
void activation_forward(Tensor<T>& x, double negative_slope) {
    const T slope = static_cast<T>(negative_slope);
    T* d = x.data();
    const size_t n = x.size();
    for (size_t i = 0; i < n; ++i)
        if (d[i] < T(0)) d[i] *= slope;
}

template <typename T>
void activation_backward(Tensor<T>& d, const T* act_out, double negative_slope) {
    const T slope = static_cast<T>(negative_slope);
    T* g = d.data();
    const size_t n = d.size();
    for (size_t i = 0; i < n; ++i)
        if (act_out[i] <= T(0)) g[i] *= slope;
}

template <typename T>
Tensor<T> avgpool2_forward(const Tensor<T>& x) {
    const int h = x.height() / 2, w = x.width() / 2;
    Tensor<T> y(x.channels(), x.samples(), h, w);
    for (int c = 0; c < x.channels(); ++c)
        for (int n = 0; n < x.samples(); ++n) {
            const T* src = x.plane(c, n);
            T* dst = y.plane(c, n);
            for (int yy = 0; yy < h; ++yy)
                for (int xx = 0; xx < w; ++xx) {
                    const T* s = src + static_cast<size_t>(2 * yy) * x.width() + 2 * xx;
                    dst[static_cast<size_t>(yy) * w + xx] =
                        (s[0] + s[1] + s[x.width()] + s[x.width() + 1]) / T(4);
                }
        }
    return y;
}

template <typename T>
Tensor<T> avgpool2_backward(const Tensor<T>& dy) {
    const int h = dy.height() * 2, w = dy.width() * 2;
    Tensor<T> dx(dy.channels(), dy.samples(), h, w);
    for (int c = 0; c < dy.channels(); ++c)
        for (int n = 0; n < dy.samples(); ++n) {
            const T* src = dy.plane(c, n);
            T* dst = dx.plane(c, n);
            for (int yy = 0; yy < dy.height(); ++yy)
                for (int xx = 0; xx < dy.width(); ++xx) {
                    const T v = src[static_cast<size_t>(yy) * dy.width() + xx] / T(4);
                    T* d = dst + static_cast<size_t>(2 * yy) * w + 2 * xx;
                    d[0] = v;
                    d[1] = v;
                    d[w] = v;
                    d[w + 1] = v;
                }
        }
    return dx;
}

template <typename T>
Tensor<T> upsample2_forward(const Tensor<T>& x) {
    const int h = x.height() * 2, w = x.width() * 2;
    Tensor<T> y(x.channels(), x.samples(), h, w);
    for (int c = 0; c < x.channels(); ++c)
        for (int n = 0; n < x.samples(); ++n) {
            const T* src = x.plane(c, n);
            T* dst = y.plane(c, n);
            for (int yy = 0; yy < h; ++yy) {
                const T* s = src + static_cast<size_t>(yy / 2) * x.width();
                T* d = dst + static_cast<size_t>(yy) * w;
                for (int xx = 0; xx < w; ++xx) d[xx] = s[xx / 2];
            }
        }
    return y;
}

template <typename T>
Tensor<T> upsample2_backward(const Tensor<T>& dy) {
    const int h = dy.height() / 2, w = dy.width() / 2;
    Tensor<T> dx(dy.channels(), dy.samples(), h, w);
    for (int c = 0; c < dy.channels(); ++c)
        for (int n = 0; n < dy.samples(); ++n) {
            const T* src = dy.plane(c, n);
            T* dst = dx.plane(c, n);
            for (int yy = 0; yy < dy.height(); ++yy)
                for (int xx = 0; xx < dy.width(); ++xx)
                    dst[static_cast<size_t>(yy / 2) * w + xx / 2] +=
                        src[static_cast<size_t>(yy) * dy.width() + xx];
        }
    return dx;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    Tensor<T> y(a.channels() + b.channels(), a.samples(), a.height(), a.width());
    std::copy(a.data(), a.data() + a.size(), y.data());
    std::copy(b.data(), b.data() + b.size(), y.data() + a.size());
    return y;
}

template <typename T>
void split_channels(const Tensor<T>& d, int first_channels, Tensor<T>& da, Tensor<T>& db) {
    da = Tensor<T>(first_channels, d.samples(), d.height(), d.width());
    db = Tensor<T>(d.channels() - first_channels, d.samples(), d.height(), d.width());
    std::copy(d.data(), d.data() + da.size(), da.data());
    std::copy(d.data() + da.size(), d.data() + d.size(), db.data());
}

template <typename T>
void add_inplace(Tensor<T>& dst, const Tensor<T>& src) {
    T* d = dst.data();
    const T* s = src.data();
    for (size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

#define TCPD_INSTANTIATE_NN_OPS(T)                                                        \
    template struct ConvParams<T>;                                                        \
    template Tensor<T> conv2d_forward(const ConvParams<T>&, const Tensor<T>&,             \
                                      Workspace<T>&);                                     \
    template Tensor<T> conv2d_backward(const ConvParams<T>&, const Tensor<T>&,            \
                                       const Tensor<T>&, ConvGrads<T>&, Workspace<T>&);   \
    template void activation_forward(Tensor<T>&, double);                                 \
    template void activation_backward(Tensor<T>&, const T*, double);                      \
    template Tensor<T> avgpool2_forward(const Tensor<T>&);                                \
    template Tensor<T> avgpool2_backward(const Tensor<T>&);                               \
    template Tensor<T> upsample2_forward(const Tensor<T>&);                               \
    template Tensor<T> upsample2_backward(const Tensor<T>&);                              \
    template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);               \
    template void split_channels(const Tensor<T>&, int, Tensor<T>&, Tensor<T>&);          \
    template void add_inplace(Tensor<T>&, const Tensor<T>&);

TCPD_INSTANTIATE_NN_OPS(float)
TCPD_INSTANTIATE_NN_OPS(double)
#undef TCPD_INSTANTIATE_NN_OPS

}  // namespace tcpd::nn
