#pragma once

#include "tcpd/image.hpp"

namespace tcpd {

// Linear-Stokes convention used throughout:
//   S0 = (I0 + I45 + I90 + I135) / 2,  S1 = I0 - I90,  S2 = I45 - I135.
// A quad is a 4-channel image in orientation order [0, 45, 90, 135];
// a Stokes image is 3-channel [S0, S1, S2]; AoP/DoP is 2-channel
// [aop_degrees in [0,180), dop in [0,1]].

inline constexpr double kStokesEpsilon = 1e-8;

template <typename T>
Image<T> compute_stokes(const Image<T>& quad);

// Degenerate pixels: dop = 0 where s0 <= eps; aop = 0 where s1^2+s2^2 <= eps^2.
// dop is clamped to [0,1].
template <typename T>
Image<T> compute_aop_dop(const Image<T>& stokes);

// Mean over pixels of min(|a-b|, 180-|a-b|); inputs in degrees [0,180).
template <typename T>
double angle_error_degrees(const Image<T>& aop_a, const Image<T>& aop_b);

// Full-range BT.601 with zero-centered chroma, applied to each orientation's
// RGB triple of a 12-channel cube:
//   Y  = 0.299 R + 0.587 G + 0.114 B
//   Cb = (B - Y) / 1.772
//   Cr = (R - Y) / 1.402
// Rows of the equivalent matrix, for (Y, Cb, Cr) from (R, G, B):
inline constexpr double kYcbcrMatrix[3][3] = {
    {0.299, 0.587, 0.114},
    {-0.299 / 1.772, -0.587 / 1.772, (1.0 - 0.114) / 1.772},
    {(1.0 - 0.299) / 1.402, -0.587 / 1.402, -0.114 / 1.402},
};

template <typename T>
Image<T> rgb_to_ycbcr(const Image<T>& cube12);

// Adjoint (transpose) of the rgb_to_ycbcr linear map; used by loss gradients.
template <typename T>
Image<T> rgb_to_ycbcr_adjoint(const Image<T>& cube12);

// False-color rendering: hue = aop/180 of the color circle, saturation = dop,
// value = 1. Returns a 3-channel RGB image in [0,1].
template <typename T>
Image<T> visualize_aop_dop(const Image<T>& aop_dop);

// HSV (h in [0,1), s,v in [0,1]) to RGB; used by the visualization above.
void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);

}  // namespace tcpd
