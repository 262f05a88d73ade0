#include "tcpd/polarization.hpp"

#include <cmath>

namespace tcpd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

template <typename T>
Image<T> compute_stokes(const Image<T>& quad) {
    if (quad.channels() != kOrientations)
        throw InvalidInput("compute_stokes: expected 4 orientation planes");
    Image<T> s(3, quad.height(), quad.width());
    const T* i0 = quad.plane(0);
    const T* i45 = quad.plane(1);
    const T* i90 = quad.plane(2);
    const T* i135 = quad.plane(3);
    T* s0 = s.plane(0);
    T* s1 = s.plane(1);
    T* s2 = s.plane(2);
    const size_t n = quad.plane_size();
    for (size_t i = 0; i < n; ++i) {
        s0[i] = (i0[i] + i45[i] + i90[i] + i135[i]) / T(2);
        s1[i] = i0[i] - i90[i];
        s2[i] = i45[i] - i135[i];
    }
    return s;
}

template <typename T>
Image<T> compute_aop_dop(const Image<T>& stokes) {
    if (stokes.channels() != 3)
        throw InvalidInput("compute_aop_dop: expected 3 Stokes planes");
    Image<T> m(2, stokes.height(), stokes.width());
    const T* s0 = stokes.plane(0);
    const T* s1 = stokes.plane(1);
    const T* s2 = stokes.plane(2);
    T* aop = m.plane(0);
    T* dop = m.plane(1);
    const size_t n = stokes.plane_size();
    for (size_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(s1[i]);
        const double b = static_cast<double>(s2[i]);
        const double mag2 = a * a + b * b;
        if (mag2 <= kStokesEpsilon * kStokesEpsilon) {
            aop[i] = T(0);
        } else {
            double deg = 0.5 * std::atan2(b, a) * 180.0 / kPi;  // (-90, 90]
            if (deg < 0.0) deg += 180.0;
            if (deg >= 180.0) deg -= 180.0;
            aop[i] = static_cast<T>(deg);
        }
        const double denom = static_cast<double>(s0[i]);
        if (denom <= kStokesEpsilon) {
            dop[i] = T(0);
        } else {
            dop[i] = static_cast<T>(std::min(1.0, std::sqrt(mag2) / denom));
        }
    }
    return m;
}

template <typename T>
double angle_error_degrees(const Image<T>& aop_a, const Image<T>& aop_b) {
    require_same_shape(aop_a, aop_b, "angle_error");
    if (aop_a.channels() != 1)
        throw InvalidInput("angle_error: expected single-channel AoP planes");
    const T* a = aop_a.plane(0);
    const T* b = aop_b.plane(0);
    const size_t n = aop_a.plane_size();
    if (n == 0) throw InvalidInput("angle_error: empty input");
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double d = std::fabs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
        sum += std::min(d, 180.0 - d);
    }
    return sum / static_cast<double>(n);
}

template <typename T>
Image<T> rgb_to_ycbcr(const Image<T>& cube12) {
    if (cube12.channels() != kCubeChannels)
        throw InvalidInput("rgb_to_ycbcr: expected 12-channel cube");
    Image<T> out(kCubeChannels, cube12.height(), cube12.width());
    const size_t n = cube12.plane_size();
    for (Orientation o : kAllOrientations) {
        const T* r = cube12.plane(cube_channel(o, ColorChannel::R));
        const T* g = cube12.plane(cube_channel(o, ColorChannel::G));
        const T* b = cube12.plane(cube_channel(o, ColorChannel::B));
        T* y = out.plane(cube_channel(o, ColorChannel::R));
        T* cb = out.plane(cube_channel(o, ColorChannel::G));
        T* cr = out.plane(cube_channel(o, ColorChannel::B));
        const auto& m = kYcbcrMatrix;
        for (size_t i = 0; i < n; ++i) {
            const double rr = r[i], gg = g[i], bb = b[i];
            y[i] = static_cast<T>(m[0][0] * rr + m[0][1] * gg + m[0][2] * bb);
            cb[i] = static_cast<T>(m[1][0] * rr + m[1][1] * gg + m[1][2] * bb);
            cr[i] = static_cast<T>(m[2][0] * rr + m[2][1] * gg + m[2][2] * bb);
        }
    }
    return out;
}

template <typename T>
Image<T> rgb_to_ycbcr_adjoint(const Image<T>& cube12) {
    if (cube12.channels() != kCubeChannels)
        throw InvalidInput("rgb_to_ycbcr_adjoint: expected 12-channel cube");
    // Rows of A map (r,g,b) -> (y,cb,cr); the adjoint applies A^T.
    const auto& m = kYcbcrMatrix;
    const double a00 = m[0][0], a01 = m[0][1], a02 = m[0][2];
    const double a10 = m[1][0], a11 = m[1][1], a12 = m[1][2];
    const double a20 = m[2][0], a21 = m[2][1], a22 = m[2][2];
    Image<T> out(kCubeChannels, cube12.height(), cube12.width());
    const size_t n = cube12.plane_size();
    for (Orientation o : kAllOrientations) {
        const T* y = cube12.plane(cube_channel(o, ColorChannel::R));
        const T* cb = cube12.plane(cube_channel(o, ColorChannel::G));
        const T* cr = cube12.plane(cube_channel(o, ColorChannel::B));
        T* r = out.plane(cube_channel(o, ColorChannel::R));
        T* g = out.plane(cube_channel(o, ColorChannel::G));
        T* b = out.plane(cube_channel(o, ColorChannel::B));
        for (size_t i = 0; i < n; ++i) {
            const double yy = y[i], u = cb[i], v = cr[i];
            r[i] = static_cast<T>(a00 * yy + a10 * u + a20 * v);
            g[i] = static_cast<T>(a01 * yy + a11 * u + a21 * v);
            b[i] = static_cast<T>(a02 * yy + a12 * u + a22 * v);
        }
    }
    return out;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
    h -= std::floor(h);
    const double x = h * 6.0;
    const int sector = std::min(5, static_cast<int>(x));
    const double f = x - sector;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
}

template <typename T>
Image<T> visualize_aop_dop(const Image<T>& aop_dop) {
    if (aop_dop.channels() != 2)
        throw InvalidInput("visualize_aop_dop: expected [aop, dop] planes");
    Image<T> rgb(3, aop_dop.height(), aop_dop.width());
    const T* aop = aop_dop.plane(0);
    const T* dop = aop_dop.plane(1);
    const size_t n = aop_dop.plane_size();
    for (size_t i = 0; i < n; ++i) {
        double r, g, b;
        const double sat = std::min(1.0, std::max(0.0, static_cast<double>(dop[i])));
        hsv_to_rgb(static_cast<double>(aop[i]) / 180.0, sat, 1.0, r, g, b);
        rgb.plane(0)[i] = static_cast<T>(r);
        rgb.plane(1)[i] = static_cast<T>(g);
        rgb.plane(2)[i] = static_cast<T>(b);
    }
    return rgb;
}

template Image<float> compute_stokes(const Image<float>&);
template Image<double> compute_stokes(const Image<double>&);
template Image<float> compute_aop_dop(const Image<float>&);
template Image<double> compute_aop_dop(const Image<double>&);
template double angle_error_degrees(const Image<float>&, const Image<float>&);
template double angle_error_degrees(const Image<double>&, const Image<double>&);
template Image<float> rgb_to_ycbcr(const Image<float>&);
template Image<double> rgb_to_ycbcr(const Image<double>&);
template Image<float> rgb_to_ycbcr_adjoint(const Image<float>&);
template Image<double> rgb_to_ycbcr_adjoint(const Image<double>&);
template Image<float> visualize_aop_dop(const Image<float>&);
template Image<double> visualize_aop_dop(const Image<double>&);

}  // namespace tcpd
