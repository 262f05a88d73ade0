#include "tcpd/mosaic.hpp"

namespace tcpd {

namespace {

template <typename T>
void require_cube(const Image<T>& cube12, const char* what) {
    if (cube12.channels() != kCubeChannels)
        throw InvalidInput(std::string(what) + ": expected 12-channel cube");
    if (cube12.height() % 4 != 0 || cube12.width() % 4 != 0)
        throw InvalidInput(std::string(what) + ": dimensions must be multiples of 4");
}

}  // namespace

template <typename T>
CpfaRaw<T> synthesize_cpfa(const Image<T>& cube12, const CpfaPattern& pattern) {
    require_cube(cube12, "synthesize_cpfa");
    const int h = cube12.height(), w = cube12.width();
    CpfaRaw<T> raw{Image<T>(1, h, w), pattern};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int ch = cube_channel(pattern.orientation_at(y, x), pattern.color_at(y, x));
            raw.data.at(0, y, x) = cube12.at(ch, y, x);
        }
    return raw;
}

template <typename T>
BayerMosaic<T> subsample_orientation(const CpfaRaw<T>& raw, Orientation o) {
    const int h = raw.data.height(), w = raw.data.width();
    if (raw.data.channels() != 1 || h % 4 != 0 || w % 4 != 0)
        throw InvalidInput("subsample_orientation: bad raw shape");
    const auto [dy, dx] = raw.pattern.orientation_offset(o);
    BayerMosaic<T> out{Image<T>(1, h / 2, w / 2), o, raw.pattern};
    for (int by = 0; by < h / 2; ++by)
        for (int bx = 0; bx < w / 2; ++bx)
            out.data.at(0, by, bx) = raw.data.at(0, 2 * by + dy, 2 * bx + dx);
    return out;
}

template <typename T>
OrientedRgb<T> extract_subsampled_rgb(const Image<T>& cube12, Orientation o,
                                      const CpfaPattern& pattern) {
    require_cube(cube12, "extract_subsampled_rgb");
    const int h = cube12.height(), w = cube12.width();
    const auto [dy, dx] = pattern.orientation_offset(o);
    OrientedRgb<T> out{Image<T>(3, h / 2, w / 2), o};
    for (ColorChannel c : kAllColors) {
        const T* src = cube12.plane(cube_channel(o, c));
        T* dst = out.data.plane(static_cast<int>(c));
        for (int by = 0; by < h / 2; ++by)
            for (int bx = 0; bx < w / 2; ++bx)
                dst[static_cast<size_t>(by) * (w / 2) + bx] =
                    src[static_cast<size_t>(2 * by + dy) * w + (2 * bx + dx)];
    }
    return out;
}

template <typename T>
PolarMosaic<T> assemble_mosaicked_polarization(const std::vector<OrientedRgb<T>>& rgbs,
                                               ColorChannel c, const CpfaPattern& pattern) {
    std::array<const OrientedRgb<T>*, kOrientations> by_orientation{};
    for (const auto& r : rgbs) {
        auto& slot = by_orientation[static_cast<int>(r.orientation)];
        if (slot) throw InvalidInput("assemble_mosaicked_polarization: duplicate orientation");
        slot = &r;
    }
    for (Orientation o : kAllOrientations)
        if (!by_orientation[static_cast<int>(o)])
            throw InvalidInput(std::string("assemble_mosaicked_polarization: missing orientation ") +
                               orientation_name(o));
    const Image<T>& first = by_orientation[0]->data;
    if (first.channels() != 3)
        throw InvalidInput("assemble_mosaicked_polarization: inputs must be RGB");
    for (const auto* r : by_orientation)
        require_same_shape(r->data, first, "assemble_mosaicked_polarization");

    const int hh = first.height(), hw = first.width();
    PolarMosaic<T> out{Image<T>(1, 2 * hh, 2 * hw), c, pattern};
    for (Orientation o : kAllOrientations) {
        const auto [dy, dx] = pattern.orientation_offset(o);
        const T* src = by_orientation[static_cast<int>(o)]->data.plane(static_cast<int>(c));
        T* dst = out.data.plane(0);
        for (int by = 0; by < hh; ++by)
            for (int bx = 0; bx < hw; ++bx)
                dst[static_cast<size_t>(2 * by + dy) * (2 * hw) + (2 * bx + dx)] =
                    src[static_cast<size_t>(by) * hw + bx];
    }
    return out;
}

template <typename T>
void assemble_adjoint_accumulate(const Image<T>& dmosaic, ColorChannel c,
                                 const CpfaPattern& pattern,
                                 std::array<Image<T>, kOrientations>& grads) {
    const int h = dmosaic.height(), w = dmosaic.width();
    for (Orientation o : kAllOrientations) {
        Image<T>& g = grads[static_cast<int>(o)];
        if (g.channels() != 3 || g.height() != h / 2 || g.width() != w / 2)
            throw InvalidInput("assemble_adjoint_accumulate: bad gradient shape");
        const auto [dy, dx] = pattern.orientation_offset(o);
        const T* src = dmosaic.plane(0);
        T* dst = g.plane(static_cast<int>(c));
        for (int by = 0; by < h / 2; ++by)
            for (int bx = 0; bx < w / 2; ++bx)
                dst[static_cast<size_t>(by) * (w / 2) + bx] +=
                    src[static_cast<size_t>(2 * by + dy) * w + (2 * bx + dx)];
    }
}

template <typename T>
Image<T> extract_channel(const Image<T>& cube12, ColorChannel c) {
    if (cube12.channels() != kCubeChannels)
        throw InvalidInput("extract_channel: expected 12-channel cube");
    Image<T> quad(kOrientations, cube12.height(), cube12.width());
    const size_t n = cube12.plane_size();
    for (Orientation o : kAllOrientations) {
        const T* src = cube12.plane(cube_channel(o, c));
        T* dst = quad.plane(static_cast<int>(o));
        std::copy(src, src + n, dst);
    }
    return quad;
}

template <typename T>
Image<T> concat_channels(const Image<T>& quad_r, const Image<T>& quad_g,
                         const Image<T>& quad_b) {
    require_same_shape(quad_r, quad_g, "concat_channels");
    require_same_shape(quad_r, quad_b, "concat_channels");
    if (quad_r.channels() != kOrientations)
        throw InvalidInput("concat_channels: expected 4 orientation planes per quad");
    Image<T> cube(kCubeChannels, quad_r.height(), quad_r.width());
    const Image<T>* quads[kColors] = {&quad_r, &quad_g, &quad_b};
    const size_t n = cube.plane_size();
    for (Orientation o : kAllOrientations)
        for (ColorChannel c : kAllColors) {
            const T* src = quads[static_cast<int>(c)]->plane(static_cast<int>(o));
            std::copy(src, src + n, cube.plane(cube_channel(o, c)));
        }
    return cube;
}

template <typename T>
BayerMosaic<T> bayer_sample(const OrientedRgb<T>& rgb, const CpfaPattern& pattern) {
    const int h = rgb.data.height(), w = rgb.data.width();
    BayerMosaic<T> out{Image<T>(1, h, w), rgb.orientation, pattern};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.data.at(0, y, x) =
                rgb.data.at(static_cast<int>(pattern.bayer_color(y, x)), y, x);
    return out;
}

#define TCPD_INSTANTIATE_MOSAIC(T)                                                          \
    template CpfaRaw<T> synthesize_cpfa(const Image<T>&, const CpfaPattern&);               \
    template BayerMosaic<T> subsample_orientation(const CpfaRaw<T>&, Orientation);          \
    template OrientedRgb<T> extract_subsampled_rgb(const Image<T>&, Orientation,            \
                                                   const CpfaPattern&);                     \
    template PolarMosaic<T> assemble_mosaicked_polarization(                                \
        const std::vector<OrientedRgb<T>>&, ColorChannel, const CpfaPattern&);              \
    template void assemble_adjoint_accumulate(const Image<T>&, ColorChannel,                \
                                              const CpfaPattern&,                           \
                                              std::array<Image<T>, kOrientations>&);        \
    template Image<T> extract_channel(const Image<T>&, ColorChannel);                       \
    template Image<T> concat_channels(const Image<T>&, const Image<T>&, const Image<T>&);   \
    template BayerMosaic<T> bayer_sample(const OrientedRgb<T>&, const CpfaPattern&);

TCPD_INSTANTIATE_MOSAIC(float)
TCPD_INSTANTIATE_MOSAIC(double)
#undef TCPD_INSTANTIATE_MOSAIC

}  // namespace tcpd
