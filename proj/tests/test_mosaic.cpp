#include <doctest.h>

#include "tcpd/mosaic.hpp"
#include "tcpd/rng.hpp"

using namespace tcpd;

namespace {

// Independent position tables for the standard pattern, kept separate from
// the CpfaPattern accessors on purpose.
constexpr int kOriGrid[2][2] = {{2, 1}, {3, 0}};  // orientation index at (y%2, x%2)
constexpr int kColGrid[2][2] = {{0, 1}, {1, 2}};  // color index at ((y/2)%2, (x/2)%2)

int oracle_channel(int y, int x) {
    return kOriGrid[y % 2][x % 2] * 3 + kColGrid[(y / 2) % 2][(x / 2) % 2];
}

Image<double> random_cube(Rng& rng, int h, int w) {
    Image<double> cube(kCubeChannels, h, w);
    for (size_t i = 0; i < cube.size(); ++i) cube.data()[i] = rng.uniform01();
    return cube;
}

}  // namespace

TEST_CASE("standard pattern layout") {
    const CpfaPattern p = CpfaPattern::standard();
    CHECK(p.orientation_at(0, 0) == Orientation::Deg90);
    CHECK(p.orientation_at(0, 1) == Orientation::Deg45);
    CHECK(p.orientation_at(1, 0) == Orientation::Deg135);
    CHECK(p.orientation_at(1, 1) == Orientation::Deg0);
    CHECK(p.color_at(0, 0) == ColorChannel::R);
    CHECK(p.color_at(0, 2) == ColorChannel::G);
    CHECK(p.color_at(2, 0) == ColorChannel::G);
    CHECK(p.color_at(2, 2) == ColorChannel::B);
    CHECK(p.orientation_offset(Orientation::Deg0) == std::pair<int, int>{1, 1});
    CHECK(p.orientation_offset(Orientation::Deg90) == std::pair<int, int>{0, 0});
}

TEST_CASE("pattern json round trip and validation") {
    const CpfaPattern p = CpfaPattern::standard();
    const CpfaPattern q = CpfaPattern::from_json(p.to_json());
    CHECK(p == q);

    CHECK_THROWS_AS(CpfaPattern::from_json("{"), InvalidInput);
    // duplicate orientation
    CHECK_THROWS_AS(
        CpfaPattern::from_json(R"({"orientations":[[90,90],[135,0]],
                                    "bayer":[["R","G"],["G","B"]]})"),
        InvalidInput);
    // two R blocks
    CHECK_THROWS_AS(
        CpfaPattern::from_json(R"({"orientations":[[90,45],[135,0]],
                                    "bayer":[["R","G"],["G","R"]]})"),
        InvalidInput);
    // G blocks not diagonal
    CHECK_THROWS_AS(
        CpfaPattern::from_json(R"({"orientations":[[90,45],[135,0]],
                                    "bayer":[["G","G"],["R","B"]]})"),
        InvalidInput);
}

TEST_CASE("synthesize: constants and the 4x4 lookup table") {
    const CpfaPattern p = CpfaPattern::standard();
    Image<double> cube(kCubeChannels, 4, 4, 0.25);
    CpfaRaw<double> raw = synthesize_cpfa(cube, p);
    for (size_t i = 0; i < raw.data.size(); ++i) CHECK(raw.data.data()[i] == 0.25);

    // distinct constant per channel: raw must render the pattern table
    for (int c = 0; c < kCubeChannels; ++c)
        std::fill(cube.plane(c), cube.plane(c) + cube.plane_size(), c / 16.0);
    raw = synthesize_cpfa(cube, p);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            CHECK(raw.data.at(0, y, x) == oracle_channel(y, x) / 16.0);
}

TEST_CASE("synthesize rejects bad dimensions") {
    Image<double> cube(kCubeChannels, 6, 8);
    CHECK_THROWS_AS(synthesize_cpfa(cube, CpfaPattern::standard()), InvalidInput);
}

TEST_CASE("synthesize round trip is bit-exact") {
    Rng rng(21);
    const CpfaPattern p = CpfaPattern::standard();
    Image<double> cube = random_cube(rng, 16, 16);
    CpfaRaw<double> raw = synthesize_cpfa(cube, p);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            CHECK(raw.data.at(0, y, x) == cube.at(oracle_channel(y, x), y, x));
}

TEST_CASE("subsample shape: a 1024x768 raw yields 512x384 mosaics") {
    CpfaRaw<double> raw{Image<double>(1, 768, 1024), CpfaPattern::standard()};
    BayerMosaic<double> m = subsample_orientation(raw, Orientation::Deg45);
    CHECK(m.data.height() == 384);
    CHECK(m.data.width() == 512);
}

TEST_CASE("the four orientation subsamples partition the raw") {
    Rng rng(3);
    const CpfaPattern p = CpfaPattern::standard();
    CpfaRaw<double> raw{Image<double>(1, 8, 12), p};
    for (size_t i = 0; i < raw.data.size(); ++i) raw.data.data()[i] = rng.uniform01();

    Image<double> rebuilt(1, 8, 12, -1.0);
    for (Orientation o : kAllOrientations) {
        BayerMosaic<double> m = subsample_orientation(raw, o);
        const auto [dy, dx] = p.orientation_offset(o);
        for (int by = 0; by < 4; ++by)
            for (int bx = 0; bx < 6; ++bx) {
                CHECK(rebuilt.at(0, 2 * by + dy, 2 * bx + dx) == -1.0);  // not seen yet
                rebuilt.at(0, 2 * by + dy, 2 * bx + dx) = m.data.at(0, by, bx);
            }
    }
    for (size_t i = 0; i < raw.data.size(); ++i)
        CHECK(rebuilt.data()[i] == raw.data.data()[i]);
}

TEST_CASE("bayer-sampling the rgb extraction reproduces the raw subsample") {
    Rng rng(4);
    const CpfaPattern p = CpfaPattern::standard();
    Image<double> cube = random_cube(rng, 8, 8);
    CpfaRaw<double> raw = synthesize_cpfa(cube, p);
    for (Orientation o : kAllOrientations) {
        OrientedRgb<double> rgb = extract_subsampled_rgb(cube, o, p);
        CHECK(rgb.data.channels() == 3);
        CHECK(rgb.data.height() == 4);
        CHECK(rgb.data.width() == 4);
        BayerMosaic<double> sampled = bayer_sample(rgb, p);
        BayerMosaic<double> direct = subsample_orientation(raw, o);
        for (size_t i = 0; i < sampled.data.size(); ++i)
            CHECK(sampled.data.data()[i] == direct.data.data()[i]);
    }
}

TEST_CASE("extraction of a constant cube is constant") {
    const CpfaPattern p = CpfaPattern::standard();
    Image<double> cube(kCubeChannels, 4, 4, 0.5);
    OrientedRgb<double> rgb = extract_subsampled_rgb(cube, Orientation::Deg135, p);
    for (size_t i = 0; i < rgb.data.size(); ++i) CHECK(rgb.data.data()[i] == 0.5);
}

TEST_CASE("assemble: 1x1 inputs land on the documented 2x2 grid") {
    const CpfaPattern p = CpfaPattern::standard();
    std::vector<OrientedRgb<double>> rgbs;
    const double vals[4] = {1.0, 2.0, 3.0, 4.0};  // a0, a45, a90, a135
    for (Orientation o : kAllOrientations) {
        OrientedRgb<double> r{Image<double>(3, 1, 1), o};
        for (int c = 0; c < 3; ++c) r.data.at(c, 0, 0) = vals[static_cast<int>(o)];
        rgbs.push_back(std::move(r));
    }
    PolarMosaic<double> m = assemble_mosaicked_polarization(rgbs, ColorChannel::G, p);
    CHECK(m.data.height() == 2);
    CHECK(m.data.width() == 2);
    CHECK(m.data.at(0, 0, 0) == 3.0);  // a90
    CHECK(m.data.at(0, 0, 1) == 2.0);  // a45
    CHECK(m.data.at(0, 1, 0) == 4.0);  // a135
    CHECK(m.data.at(0, 1, 1) == 1.0);  // a0
}

TEST_CASE("assemble requires all four orientations") {
    const CpfaPattern p = CpfaPattern::standard();
    std::vector<OrientedRgb<double>> rgbs;
    for (int o = 0; o < 3; ++o)
        rgbs.push_back(OrientedRgb<double>{Image<double>(3, 1, 1), static_cast<Orientation>(o)});
    CHECK_THROWS_AS(assemble_mosaicked_polarization(rgbs, ColorChannel::R, p), InvalidInput);
    rgbs.push_back(OrientedRgb<double>{Image<double>(3, 1, 1), Orientation::Deg45});
    CHECK_THROWS_AS(assemble_mosaicked_polarization(rgbs, ColorChannel::R, p), InvalidInput);
}

TEST_CASE("assembling ground-truth extractions reproduces the truth mosaic") {
    Rng rng(6);
    const CpfaPattern p = CpfaPattern::standard();
    Image<double> cube = random_cube(rng, 8, 8);
    std::vector<OrientedRgb<double>> rgbs;
    for (Orientation o : kAllOrientations) rgbs.push_back(extract_subsampled_rgb(cube, o, p));
    for (ColorChannel c : kAllColors) {
        PolarMosaic<double> m = assemble_mosaicked_polarization(rgbs, c, p);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                const int o = kOriGrid[y % 2][x % 2];
                CHECK(m.data.at(0, y, x) ==
                      cube.at(o * 3 + static_cast<int>(c), y, x));
            }
    }
}

TEST_CASE("extract/concat channels round trip") {
    Rng rng(8);
    Image<double> cube = random_cube(rng, 4, 8);
    Image<double> r = extract_channel(cube, ColorChannel::R);
    Image<double> g = extract_channel(cube, ColorChannel::G);
    Image<double> b = extract_channel(cube, ColorChannel::B);
    CHECK(r.channels() == 4);
    Image<double> back = concat_channels(r, g, b);
    for (size_t i = 0; i < cube.size(); ++i) CHECK(back.data()[i] == cube.data()[i]);

    // channel order on distinct constants
    Image<double> quads[3];
    for (int c = 0; c < 3; ++c) {
        quads[c] = Image<double>(4, 2, 2);
        for (int o = 0; o < 4; ++o)
            std::fill(quads[c].plane(o), quads[c].plane(o) + 4, 10.0 * o + c);
    }
    Image<double> built = concat_channels(quads[0], quads[1], quads[2]);
    for (int o = 0; o < 4; ++o)
        for (int c = 0; c < 3; ++c)
            CHECK(built.at(3 * o + c, 0, 0) == 10.0 * o + c);

    Image<double> zero_quad(4, 2, 2);
    Image<double> zc = concat_channels(zero_quad, zero_quad, zero_quad);
    for (size_t i = 0; i < zc.size(); ++i) CHECK(zc.data()[i] == 0.0);

    Image<double> mismatched(4, 2, 4);
    CHECK_THROWS_AS(concat_channels(zero_quad, mismatched, zero_quad), InvalidInput);
}
