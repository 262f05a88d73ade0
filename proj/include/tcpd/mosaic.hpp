#pragma once

#include <array>
#include <vector>

#include "tcpd/image.hpp"
#include "tcpd/pattern.hpp"

namespace tcpd {

// 1-channel CPFA raw frame together with the pattern that produced it.
template <typename T>
struct CpfaRaw {
    Image<T> data;  // 1 channel, H x W
    CpfaPattern pattern;
};

// Half-resolution Bayer mosaic of one polarization orientation.
template <typename T>
struct BayerMosaic {
    Image<T> data;  // 1 channel, H/2 x W/2
    Orientation orientation = Orientation::Deg0;
    CpfaPattern pattern;
};

// Half-resolution RGB image of one polarization orientation.
template <typename T>
struct OrientedRgb {
    Image<T> data;  // 3 channels, H/2 x W/2
    Orientation orientation = Orientation::Deg0;
};

// Full-resolution single-color mosaic of the four orientations.
template <typename T>
struct PolarMosaic {
    Image<T> data;  // 1 channel, H x W
    ColorChannel color = ColorChannel::R;
    CpfaPattern pattern;
};

// Sample the 12-channel cube through the pattern. Dimensions must be
// multiples of 4. Lossless: raw(y,x) = cube[orientation(y,x)][color(y,x)](y,x).
template <typename T>
CpfaRaw<T> synthesize_cpfa(const Image<T>& cube12, const CpfaPattern& pattern);

// Gather the one pixel of the given orientation out of every 2x2 block.
template <typename T>
BayerMosaic<T> subsample_orientation(const CpfaRaw<T>& raw, Orientation o);

// Ground-truth counterpart of subsample_orientation: the RGB triple of
// orientation o at the same sensor position the raw sample came from.
template <typename T>
OrientedRgb<T> extract_subsampled_rgb(const Image<T>& cube12, Orientation o,
                                      const CpfaPattern& pattern);

// Interleave channel c of the four half-resolution images back onto the
// full-resolution grid (pixel-shuffle style); orientation of pixel (y,x)
// is pattern.orientation_at(y,x). Requires exactly one image per orientation.
template <typename T>
PolarMosaic<T> assemble_mosaicked_polarization(const std::vector<OrientedRgb<T>>& rgbs,
                                               ColorChannel c, const CpfaPattern& pattern);

// Adjoint of assemble_mosaicked_polarization: scatter a full-resolution
// gradient plane back into the four half-resolution RGB gradients
// (accumulates into channel c of grads[orientation]).
template <typename T>
void assemble_adjoint_accumulate(const Image<T>& dmosaic, ColorChannel c,
                                 const CpfaPattern& pattern,
                                 std::array<Image<T>, kOrientations>& grads);

// The four full-resolution orientation planes of one color channel.
template <typename T>
Image<T> extract_channel(const Image<T>& cube12, ColorChannel c);

// Form the canonical 12-channel cube from per-color orientation quads.
template <typename T>
Image<T> concat_channels(const Image<T>& quad_r, const Image<T>& quad_g,
                         const Image<T>& quad_b);

// Bayer-sample an oriented RGB image through the pattern's half-res phase.
template <typename T>
BayerMosaic<T> bayer_sample(const OrientedRgb<T>& rgb, const CpfaPattern& pattern);

}  // namespace tcpd
