#pragma once

#include "tcpd/mosaic.hpp"

namespace tcpd {

// Fixed-stencil bilinear demosaicking. All interpolators are linear, keep
// observed samples unchanged, and use whole-sample reflective padding at
// the borders.

// Bayer demosaicking: G by the 4-neighbor cross average, R/B by the
// separable tent [[1,2,1],[2,4,2],[1,2,1]]/4 on their stride-2 grids.
template <typename T>
OrientedRgb<T> bayer_bilinear(const BayerMosaic<T>& mosaic);

// Per-orientation tent interpolation of a 2x2-pattern polarization mosaic;
// returns the 4-channel orientation quad.
template <typename T>
Image<T> polarization_bilinear(const PolarMosaic<T>& mosaic);

// Adjoint of polarization_bilinear (gradients flow back to the mosaic).
template <typename T>
Image<T> polarization_bilinear_adjoint(const Image<T>& dquad, const CpfaPattern& pattern);

// Two-step bilinear pipeline: subsample -> Bayer bilinear (x4) ->
// reassemble (x3) -> polarization bilinear -> concat. This is also the
// zero-residual initialization every network refines.
template <typename T>
Image<T> bilinear_baseline(const CpfaRaw<T>& raw);

}  // namespace tcpd
