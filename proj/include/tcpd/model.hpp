#pragma once

#include <string>
#include <vector>

#include "tcpd/interp.hpp"
#include "tcpd/nn/unet.hpp"

namespace tcpd {

enum class ModelKind { TwoStep, SingleStep };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

// A demosaicking model: either the two-step pair (one shared-weight color
// network refining all four orientations, one shared-weight polarization
// network refining all three colors) or the single-step joint network.
template <typename T>
struct DemosaickModel {
    ModelKind kind = ModelKind::TwoStep;
    nn::ArchitectureSpec arch;
    CpfaPattern pattern;
    nn::UNet<T> color_net;  // two-step: 3 -> 3
    nn::UNet<T> polar_net;  // two-step: 4 -> 4
    nn::UNet<T> joint_net;  // single-step: 12 -> 12

    static DemosaickModel two_step(const nn::ArchitectureSpec& arch, const CpfaPattern& pattern,
                                   uint64_t seed, bool zero_init_final = true);
    static DemosaickModel single_step(const nn::ArchitectureSpec& arch, const CpfaPattern& pattern,
                                      uint64_t seed, bool zero_init_final = true);

    size_t parameter_count() const;
};

// Named view of every parameter buffer, in checkpoint order.
template <typename T>
struct ParamSlot {
    std::string name;
    std::vector<T>* values;
    std::vector<int> shape;
};

template <typename T>
std::vector<ParamSlot<T>> model_parameters(DemosaickModel<T>& model);

// Whole-sample reflective pad to (target_h, target_w); top-left anchored.
template <typename T>
Image<T> reflect_pad(const Image<T>& img, int target_h, int target_w);

template <typename T>
Image<T> crop_top_left(const Image<T>& img, int h, int w);

// Refine a batch whose spatial size is already divisible by 2^levels;
// adds the global residual when the architecture asks for it.
template <typename T>
nn::Tensor<T> refine_batch(const nn::UNet<T>& net, const nn::Tensor<T>& x, nn::Workspace<T>& ws);

// Single-image refinement with reflective pad/crop for arbitrary sizes.
template <typename T>
Image<T> refine_image(const nn::UNet<T>& net, const Image<T>& img, nn::Workspace<T>& ws);

// Bilinear initialization + CNN refinement for one Bayer mosaic.
template <typename T>
OrientedRgb<T> color_demosaick(const BayerMosaic<T>& mosaic, const nn::UNet<T>& net,
                               nn::Workspace<T>& ws);

// Bilinear initialization + CNN refinement for one polarization mosaic.
template <typename T>
Image<T> polarization_demosaick(const PolarMosaic<T>& mosaic, const nn::UNet<T>& net,
                                nn::Workspace<T>& ws);

// Full two-step pipeline: raw -> 12-channel cube (values unclamped).
template <typename T>
Image<T> tcpdnet_forward(const CpfaRaw<T>& raw, const DemosaickModel<T>& model);

// Single-step pipeline: bilinear cube -> joint refinement.
template <typename T>
Image<T> single_step_forward(const CpfaRaw<T>& raw, const DemosaickModel<T>& model);

// Dispatch on model.kind.
template <typename T>
Image<T> model_forward(const CpfaRaw<T>& raw, const DemosaickModel<T>& model);

// Versioned checkpoint archive: header + JSON metadata (kind, architecture,
// pattern) + named float32 tensors. Round-trips bit-exactly.
void save_checkpoint(const DemosaickModel<float>& model, const std::string& path);
DemosaickModel<float> load_checkpoint(const std::string& path);

// As above, but rejects checkpoints whose stored architecture differs from
// the one the caller expects.
DemosaickModel<float> load_checkpoint(const std::string& path,
                                      const nn::ArchitectureSpec& expected);

}  // namespace tcpd
