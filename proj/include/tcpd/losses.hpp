#pragma once

#include <vector>

#include "tcpd/mosaic.hpp"
#include "tcpd/nn/tensor.hpp"

namespace tcpd {

// L1 reconstruction losses. Normalizers use the raw dimensions H, W:
// the sub-sampled color loss divides by 3HW, the full-cube losses by 12HW,
// so a constant per-element error of e yields exactly e in every case.
template <typename T>
struct LossBreakdown {
    T l_c = T(0);
    T l_cp = T(0);
    T l_cp_ycbcr = T(0);
    T total = T(0);
    T alpha = T(0);
};

// Mean absolute error of the four half-resolution RGB predictions against
// the ground-truth extractions V_theta(z).
template <typename T>
T loss_c(const std::vector<OrientedRgb<T>>& preds, const Image<T>& truth_cube,
         const CpfaPattern& pattern);

// Mean absolute error over all 12 channels of the reconstructed cube.
template <typename T>
T loss_cp(const Image<T>& pred_cube, const Image<T>& truth_cube);

// Same, measured after converting both cubes to YCbCr.
template <typename T>
T loss_cp_ycbcr(const Image<T>& pred_cube, const Image<T>& truth_cube);

template <typename T>
T total_loss(T l_c_value, T cp_term, T alpha) {
    return l_c_value + alpha * cp_term;
}

// ---- batched tensor forms used by the optimizer ----
// Values are means matching the image-domain definitions (the tensor element
// count is exactly items * 3HW or items * 12HW). Gradients accumulate
// scale * sign(pred - target) / count into dpred; the L1 subgradient at an
// exact match is 0.

template <typename T>
T l1_mean(const nn::Tensor<T>& pred, const nn::Tensor<T>& target);

template <typename T>
T l1_mean_grad(const nn::Tensor<T>& pred, const nn::Tensor<T>& target, T scale,
               nn::Tensor<T>& dpred);

// YCbCr loss over the polarization-stage tensor (4 orientation rows; samples
// ordered item-major as R,G,B triples). Returns the loss value and
// accumulates the gradient through the color transform's adjoint.
template <typename T>
T loss_cp_ycbcr_tensor(const nn::Tensor<T>& pred, const nn::Tensor<T>& target);

template <typename T>
T loss_cp_ycbcr_tensor_grad(const nn::Tensor<T>& pred, const nn::Tensor<T>& target, T scale,
                            nn::Tensor<T>& dpred);

}  // namespace tcpd
