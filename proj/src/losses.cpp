#include "tcpd/losses.hpp"

#include <cmath>

#include "tcpd/polarization.hpp"

namespace tcpd {

template <typename T>
T loss_c(const std::vector<OrientedRgb<T>>& preds, const Image<T>& truth_cube,
         const CpfaPattern& pattern) {
    if (preds.size() != kOrientations)
        throw InvalidInput("loss_c: need one prediction per orientation");
    bool seen[kOrientations] = {false, false, false, false};
    double sum = 0.0;
    for (const auto& pred : preds) {
        const int oi = static_cast<int>(pred.orientation);
        if (seen[oi]) throw InvalidInput("loss_c: duplicate orientation");
        seen[oi] = true;
        OrientedRgb<T> target = extract_subsampled_rgb(truth_cube, pred.orientation, pattern);
        require_same_shape(pred.data, target.data, "loss_c");
        const T* p = pred.data.data();
        const T* t = target.data.data();
        for (size_t i = 0; i < pred.data.size(); ++i)
            sum += std::abs(static_cast<double>(p[i]) - static_cast<double>(t[i]));
    }
    // 3HW with H, W the raw dimensions (= 4x the half-res pixel count)
    const double denom = 3.0 * 4.0 * static_cast<double>(preds[0].data.plane_size());
    return static_cast<T>(sum / denom);
}

template <typename T>
T loss_cp(const Image<T>& pred_cube, const Image<T>& truth_cube) {
    require_same_shape(pred_cube, truth_cube, "loss_cp");
    if (pred_cube.channels() != kCubeChannels)
        throw InvalidInput("loss_cp: expected 12-channel cubes");
    const T* p = pred_cube.data();
    const T* t = truth_cube.data();
    double sum = 0.0;
    for (size_t i = 0; i < pred_cube.size(); ++i)
        sum += std::abs(static_cast<double>(p[i]) - static_cast<double>(t[i]));
    return static_cast<T>(sum / static_cast<double>(pred_cube.size()));
}

template <typename T>
T loss_cp_ycbcr(const Image<T>& pred_cube, const Image<T>& truth_cube) {
    require_same_shape(pred_cube, truth_cube, "loss_cp_ycbcr");
    return loss_cp(rgb_to_ycbcr(pred_cube), rgb_to_ycbcr(truth_cube));
}

template <typename T>
T l1_mean(const nn::Tensor<T>& pred, const nn::Tensor<T>& target) {
    if (!pred.same_shape(target)) throw InvalidInput("l1_mean: shape mismatch");
    const T* p = pred.data();
    const T* t = target.data();
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i)
        sum += std::abs(static_cast<double>(p[i]) - static_cast<double>(t[i]));
    return static_cast<T>(sum / static_cast<double>(pred.size()));
}

template <typename T>
T l1_mean_grad(const nn::Tensor<T>& pred, const nn::Tensor<T>& target, T scale,
               nn::Tensor<T>& dpred) {
    if (!pred.same_shape(target) || !pred.same_shape(dpred))
        throw InvalidInput("l1_mean_grad: shape mismatch");
    const T* p = pred.data();
    const T* t = target.data();
    T* g = dpred.data();
    const T unit = scale / static_cast<T>(pred.size());
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
        sum += std::abs(d);
        if (d > 0.0)
            g[i] += unit;
        else if (d < 0.0)
            g[i] -= unit;
    }
    return static_cast<T>(sum / static_cast<double>(pred.size()));
}

namespace {

// Polarization-stage tensors carry samples as item-major (R,G,B) triples.
template <typename T>
nn::Tensor<T> ycbcr_forward_polar(const nn::Tensor<T>& t) {
    if (t.channels() != kOrientations || t.samples() % kColors != 0)
        throw InvalidInput("ycbcr: bad polarization tensor shape");
    nn::Tensor<T> out(t.channels(), t.samples(), t.height(), t.width());
    const size_t ps = t.plane_size();
    const auto& m = kYcbcrMatrix;
    for (int o = 0; o < t.channels(); ++o)
        for (int item = 0; item < t.samples() / kColors; ++item) {
            const T* r = t.plane(o, item * kColors + 0);
            const T* g = t.plane(o, item * kColors + 1);
            const T* b = t.plane(o, item * kColors + 2);
            T* y = out.plane(o, item * kColors + 0);
            T* cb = out.plane(o, item * kColors + 1);
            T* cr = out.plane(o, item * kColors + 2);
            for (size_t i = 0; i < ps; ++i) {
                const double rr = r[i], gg = g[i], bb = b[i];
                y[i] = static_cast<T>(m[0][0] * rr + m[0][1] * gg + m[0][2] * bb);
                cb[i] = static_cast<T>(m[1][0] * rr + m[1][1] * gg + m[1][2] * bb);
                cr[i] = static_cast<T>(m[2][0] * rr + m[2][1] * gg + m[2][2] * bb);
            }
        }
    return out;
}

}  // namespace

template <typename T>
T loss_cp_ycbcr_tensor(const nn::Tensor<T>& pred, const nn::Tensor<T>& target) {
    return l1_mean(ycbcr_forward_polar(pred), ycbcr_forward_polar(target));
}

template <typename T>
T loss_cp_ycbcr_tensor_grad(const nn::Tensor<T>& pred, const nn::Tensor<T>& target, T scale,
                            nn::Tensor<T>& dpred) {
    if (!pred.same_shape(target) || !pred.same_shape(dpred))
        throw InvalidInput("loss_cp_ycbcr_tensor_grad: shape mismatch");
    nn::Tensor<T> yc_pred = ycbcr_forward_polar(pred);
    nn::Tensor<T> yc_tgt = ycbcr_forward_polar(target);
    const T unit = scale / static_cast<T>(pred.size());
    const size_t ps = pred.plane_size();
    const auto& m = kYcbcrMatrix;
    double sum = 0.0;
    // dL/d(ycbcr) folded through A^T on the fly, one triple at a time
    for (int o = 0; o < pred.channels(); ++o)
        for (int item = 0; item < pred.samples() / kColors; ++item) {
            const T* py = yc_pred.plane(o, item * kColors + 0);
            const T* pcb = yc_pred.plane(o, item * kColors + 1);
            const T* pcr = yc_pred.plane(o, item * kColors + 2);
            const T* ty = yc_tgt.plane(o, item * kColors + 0);
            const T* tcb = yc_tgt.plane(o, item * kColors + 1);
            const T* tcr = yc_tgt.plane(o, item * kColors + 2);
            T* gr = dpred.plane(o, item * kColors + 0);
            T* gg = dpred.plane(o, item * kColors + 1);
            T* gb = dpred.plane(o, item * kColors + 2);
            for (size_t i = 0; i < ps; ++i) {
                double dy = static_cast<double>(py[i]) - static_cast<double>(ty[i]);
                double dcb = static_cast<double>(pcb[i]) - static_cast<double>(tcb[i]);
                double dcr = static_cast<double>(pcr[i]) - static_cast<double>(tcr[i]);
                sum += std::abs(dy) + std::abs(dcb) + std::abs(dcr);
                const double sy = dy > 0.0 ? 1.0 : (dy < 0.0 ? -1.0 : 0.0);
                const double scb = dcb > 0.0 ? 1.0 : (dcb < 0.0 ? -1.0 : 0.0);
                const double scr = dcr > 0.0 ? 1.0 : (dcr < 0.0 ? -1.0 : 0.0);
                gr[i] += static_cast<T>(unit * (m[0][0] * sy + m[1][0] * scb + m[2][0] * scr));
                gg[i] += static_cast<T>(unit * (m[0][1] * sy + m[1][1] * scb + m[2][1] * scr));
                gb[i] += static_cast<T>(unit * (m[0][2] * sy + m[1][2] * scb + m[2][2] * scr));
            }
        }
    return static_cast<T>(sum / static_cast<double>(pred.size()));
}

#define TCPD_INSTANTIATE_LOSSES(T)                                                           \
    template T loss_c(const std::vector<OrientedRgb<T>>&, const Image<T>&,                   \
                      const CpfaPattern&);                                                    \
    template T loss_cp(const Image<T>&, const Image<T>&);                                     \
    template T loss_cp_ycbcr(const Image<T>&, const Image<T>&);                              \
    template T l1_mean(const nn::Tensor<T>&, const nn::Tensor<T>&);                           \
    template T l1_mean_grad(const nn::Tensor<T>&, const nn::Tensor<T>&, T, nn::Tensor<T>&);   \
    template T loss_cp_ycbcr_tensor(const nn::Tensor<T>&, const nn::Tensor<T>&);              \
    template T loss_cp_ycbcr_tensor_grad(const nn::Tensor<T>&, const nn::Tensor<T>&, T,       \
                                         nn::Tensor<T>&);

TCPD_INSTANTIATE_LOSSES(float)
TCPD_INSTANTIATE_LOSSES(double)
#undef TCPD_INSTANTIATE_LOSSES

}  // namespace tcpd
