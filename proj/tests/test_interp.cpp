#include <doctest.h>

#include <cmath>

#include "tcpd/interp.hpp"
#include "tcpd/rng.hpp"

using namespace tcpd;

namespace {

BayerMosaic<double> ramp_bayer(int h, int w, double a, double by, double bx) {
    BayerMosaic<double> m{Image<double>(1, h, w), Orientation::Deg0, CpfaPattern::standard()};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.data.at(0, y, x) = a + by * y + bx * x;
    return m;
}

}  // namespace

TEST_CASE("bayer bilinear reproduces constants exactly") {
    BayerMosaic<double> m{Image<double>(1, 6, 8, 0.37), Orientation::Deg45,
                          CpfaPattern::standard()};
    OrientedRgb<double> rgb = bayer_bilinear(m);
    CHECK(rgb.orientation == Orientation::Deg45);
    for (size_t i = 0; i < rgb.data.size(); ++i) CHECK(rgb.data.data()[i] == 0.37);
}

TEST_CASE("bayer bilinear is exact on ramps in the interior") {
    BayerMosaic<double> m = ramp_bayer(10, 12, 0.2, 0.01, 0.02);
    OrientedRgb<double> rgb = bayer_bilinear(m);
    for (int c = 0; c < 3; ++c)
        for (int y = 1; y < 9; ++y)
            for (int x = 1; x < 11; ++x)
                CHECK(rgb.data.at(c, y, x) ==
                      doctest::Approx(0.2 + 0.01 * y + 0.02 * x).epsilon(1e-12));
}

TEST_CASE("bayer bilinear passes observed samples through") {
    Rng rng(31);
    const CpfaPattern p = CpfaPattern::standard();
    BayerMosaic<double> m{Image<double>(1, 8, 8), Orientation::Deg0, p};
    for (size_t i = 0; i < m.data.size(); ++i) m.data.data()[i] = rng.uniform01();
    OrientedRgb<double> rgb = bayer_bilinear(m);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const int c = static_cast<int>(p.bayer_color(y, x));
            CHECK(rgb.data.at(c, y, x) == m.data.at(0, y, x));
        }
}

TEST_CASE("polarization bilinear: constants, periodic input, pass-through") {
    const CpfaPattern p = CpfaPattern::standard();
    PolarMosaic<double> m{Image<double>(1, 8, 8, 0.61), ColorChannel::R, p};
    Image<double> quad = polarization_bilinear(m);
    CHECK(quad.channels() == 4);
    for (size_t i = 0; i < quad.size(); ++i) CHECK(quad.data()[i] == 0.61);

    // tiled [[a90,a45],[a135,a0]] -> each plane constant at its own value
    const double a0 = 0.1, a45 = 0.3, a90 = 0.5, a135 = 0.9;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const double grid[2][2] = {{a90, a45}, {a135, a0}};
            m.data.at(0, y, x) = grid[y % 2][x % 2];
        }
    quad = polarization_bilinear(m);
    const double expect[4] = {a0, a45, a90, a135};
    for (int o = 0; o < 4; ++o)
        for (size_t i = 0; i < quad.plane_size(); ++i)
            CHECK(quad.plane(o)[i] == doctest::Approx(expect[o]).epsilon(1e-15));

    // pass-through at the orientation's own sites
    Rng rng(32);
    for (size_t i = 0; i < m.data.size(); ++i) m.data.data()[i] = rng.uniform01();
    quad = polarization_bilinear(m);
    for (Orientation o : kAllOrientations) {
        const auto [dy, dx] = p.orientation_offset(o);
        for (int y = dy; y < 8; y += 2)
            for (int x = dx; x < 8; x += 2)
                CHECK(quad.at(static_cast<int>(o), y, x) == m.data.at(0, y, x));
    }
}

TEST_CASE("polarization bilinear is exact on ramps in the interior") {
    const CpfaPattern p = CpfaPattern::standard();
    PolarMosaic<double> m{Image<double>(1, 12, 12), ColorChannel::G, p};
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) m.data.at(0, y, x) = 0.1 + 0.013 * y + 0.007 * x;
    Image<double> quad = polarization_bilinear(m);
    for (int o = 0; o < 4; ++o)
        for (int y = 2; y < 10; ++y)
            for (int x = 2; x < 10; ++x)
                CHECK(quad.at(o, y, x) ==
                      doctest::Approx(0.1 + 0.013 * y + 0.007 * x).epsilon(1e-12));
}

TEST_CASE("interpolators are linear") {
    Rng rng(33);
    const CpfaPattern p = CpfaPattern::standard();
    const double alpha = 1.7, beta = -0.4;

    BayerMosaic<double> a{Image<double>(1, 8, 8), Orientation::Deg0, p};
    BayerMosaic<double> b{Image<double>(1, 8, 8), Orientation::Deg0, p};
    BayerMosaic<double> mix{Image<double>(1, 8, 8), Orientation::Deg0, p};
    for (size_t i = 0; i < a.data.size(); ++i) {
        a.data.data()[i] = rng.uniform01();
        b.data.data()[i] = rng.uniform01();
        mix.data.data()[i] = alpha * a.data.data()[i] + beta * b.data.data()[i];
    }
    Image<double> ia = bayer_bilinear(a).data;
    Image<double> ib = bayer_bilinear(b).data;
    Image<double> imix = bayer_bilinear(mix).data;
    for (size_t i = 0; i < ia.size(); ++i)
        CHECK(imix.data()[i] ==
              doctest::Approx(alpha * ia.data()[i] + beta * ib.data()[i]).epsilon(1e-12));

    PolarMosaic<double> pa{a.data, ColorChannel::R, p};
    PolarMosaic<double> pb{b.data, ColorChannel::R, p};
    PolarMosaic<double> pmix{mix.data, ColorChannel::R, p};
    Image<double> qa = polarization_bilinear(pa);
    Image<double> qb = polarization_bilinear(pb);
    Image<double> qmix = polarization_bilinear(pmix);
    for (size_t i = 0; i < qa.size(); ++i)
        CHECK(qmix.data()[i] ==
              doctest::Approx(alpha * qa.data()[i] + beta * qb.data()[i]).epsilon(1e-12));
}

TEST_CASE("polarization bilinear adjoint satisfies the inner-product identity") {
    Rng rng(34);
    const CpfaPattern p = CpfaPattern::standard();
    PolarMosaic<double> m{Image<double>(1, 8, 8), ColorChannel::B, p};
    for (size_t i = 0; i < m.data.size(); ++i) m.data.data()[i] = rng.uniform(-1.0, 1.0);
    Image<double> dq(4, 8, 8);
    for (size_t i = 0; i < dq.size(); ++i) dq.data()[i] = rng.uniform(-1.0, 1.0);

    Image<double> fwd = polarization_bilinear(m);
    Image<double> adj = polarization_bilinear_adjoint(dq, p);
    double lhs = 0.0, rhs = 0.0;
    for (size_t i = 0; i < fwd.size(); ++i) lhs += fwd.data()[i] * dq.data()[i];
    for (size_t i = 0; i < adj.size(); ++i) rhs += adj.data()[i] * m.data.data()[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("bilinear baseline: constants and determinism") {
    const CpfaPattern p = CpfaPattern::standard();
    CpfaRaw<double> raw{Image<double>(1, 8, 8, 0.42), p};
    Image<double> cube = bilinear_baseline(raw);
    CHECK(cube.channels() == kCubeChannels);
    for (size_t i = 0; i < cube.size(); ++i) CHECK(cube.data()[i] == 0.42);

    Rng rng(35);
    for (size_t i = 0; i < raw.data.size(); ++i) raw.data.data()[i] = rng.uniform01();
    Image<double> c1 = bilinear_baseline(raw);
    Image<double> c2 = bilinear_baseline(raw);
    for (size_t i = 0; i < c1.size(); ++i) CHECK(c1.data()[i] == c2.data()[i]);
}
