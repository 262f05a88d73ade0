#include "tcpd/interp.hpp"

namespace tcpd {

namespace {

// kernels are 3x3, stored row-major, already divided by 4
const double kTent[9] = {0.25, 0.5, 0.25, 0.5, 1.0, 0.5, 0.25, 0.5, 0.25};
const double kCross[9] = {0.0, 0.25, 0.0, 0.25, 1.0, 0.25, 0.0, 0.25, 0.0};

// y(p) = sum_taps k(t) * zf(reflect(p + t)) over a zero-filled sample plane.
template <typename T>
void conv3_reflect(const Image<T>& zf, const double* kernel, T* out) {
    const int h = zf.height(), w = zf.width();
    const T* src = zf.plane(0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = reflect_index(y + dy, h);
                for (int dx = -1; dx <= 1; ++dx) {
                    const double k = kernel[(dy + 1) * 3 + (dx + 1)];
                    if (k == 0.0) continue;
                    const int xx = reflect_index(x + dx, w);
                    acc += k * static_cast<double>(src[static_cast<size_t>(yy) * w + xx]);
                }
            }
            out[static_cast<size_t>(y) * w + x] = static_cast<T>(acc);
        }
    }
}

}  // namespace

template <typename T>
OrientedRgb<T> bayer_bilinear(const BayerMosaic<T>& mosaic) {
    const int h = mosaic.data.height(), w = mosaic.data.width();
    if (mosaic.data.channels() != 1 || h < 2 || w < 2)
        throw InvalidInput("bayer_bilinear: bad mosaic shape");
    OrientedRgb<T> out{Image<T>(3, h, w), mosaic.orientation};
    Image<T> zf(1, h, w);
    for (ColorChannel c : kAllColors) {
        std::fill(zf.plane(0), zf.plane(0) + zf.plane_size(), T(0));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (mosaic.pattern.bayer_color(y, x) == c)
                    zf.at(0, y, x) = mosaic.data.at(0, y, x);
        const double* kernel = (c == ColorChannel::G) ? kCross : kTent;
        conv3_reflect(zf, kernel, out.data.plane(static_cast<int>(c)));
    }
    return out;
}

template <typename T>
Image<T> polarization_bilinear(const PolarMosaic<T>& mosaic) {
    const int h = mosaic.data.height(), w = mosaic.data.width();
    if (mosaic.data.channels() != 1 || h % 2 != 0 || w % 2 != 0)
        throw InvalidInput("polarization_bilinear: bad mosaic shape");
    Image<T> quad(kOrientations, h, w);
    Image<T> zf(1, h, w);
    for (Orientation o : kAllOrientations) {
        const auto [dy, dx] = mosaic.pattern.orientation_offset(o);
        std::fill(zf.plane(0), zf.plane(0) + zf.plane_size(), T(0));
        for (int y = dy; y < h; y += 2)
            for (int x = dx; x < w; x += 2)
                zf.at(0, y, x) = mosaic.data.at(0, y, x);
        conv3_reflect(zf, kTent, quad.plane(static_cast<int>(o)));
    }
    return quad;
}

template <typename T>
Image<T> polarization_bilinear_adjoint(const Image<T>& dquad, const CpfaPattern& pattern) {
    const int h = dquad.height(), w = dquad.width();
    if (dquad.channels() != kOrientations || h % 2 != 0 || w % 2 != 0)
        throw InvalidInput("polarization_bilinear_adjoint: bad quad shape");
    Image<T> dmosaic(1, h, w);
    T* dm = dmosaic.plane(0);
    for (Orientation o : kAllOrientations) {
        const auto [sy, sx] = pattern.orientation_offset(o);
        const T* dq = dquad.plane(static_cast<int>(o));
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double g = static_cast<double>(dq[static_cast<size_t>(y) * w + x]);
                if (g == 0.0) continue;
                for (int dy = -1; dy <= 1; ++dy) {
                    const int yy = reflect_index(y + dy, h);
                    if ((yy & 1) != sy) continue;
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int xx = reflect_index(x + dx, w);
                        if ((xx & 1) != sx) continue;
                        dm[static_cast<size_t>(yy) * w + xx] +=
                            static_cast<T>(kTent[(dy + 1) * 3 + (dx + 1)] * g);
                    }
                }
            }
        }
    }
    return dmosaic;
}

template <typename T>
Image<T> bilinear_baseline(const CpfaRaw<T>& raw) {
    std::vector<OrientedRgb<T>> rgbs;
    rgbs.reserve(kOrientations);
    for (Orientation o : kAllOrientations)
        rgbs.push_back(bayer_bilinear(subsample_orientation(raw, o)));
    Image<T> quads[kColors];
    for (ColorChannel c : kAllColors) {
        PolarMosaic<T> m = assemble_mosaicked_polarization(rgbs, c, raw.pattern);
        quads[static_cast<int>(c)] = polarization_bilinear(m);
    }
    return concat_channels(quads[0], quads[1], quads[2]);
}

#define TCPD_INSTANTIATE_INTERP(T)                                                   \
    template OrientedRgb<T> bayer_bilinear(const BayerMosaic<T>&);                   \
    template Image<T> polarization_bilinear(const PolarMosaic<T>&);                  \
    template Image<T> polarization_bilinear_adjoint(const Image<T>&,                 \
                                                    const CpfaPattern&);             \
    template Image<T> bilinear_baseline(const CpfaRaw<T>&);

TCPD_INSTANTIATE_INTERP(float)
TCPD_INSTANTIATE_INTERP(double)
#undef TCPD_INSTANTIATE_INTERP

}  // namespace tcpd
