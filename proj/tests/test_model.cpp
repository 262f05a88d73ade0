#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "tcpd/model.hpp"
#include "tcpd/rng.hpp"

using namespace tcpd;

namespace {

template <typename T>
CpfaRaw<T> random_raw(Rng& rng, int h, int w) {
    CpfaRaw<T> raw{Image<T>(1, h, w), CpfaPattern::standard()};
    for (size_t i = 0; i < raw.data.size(); ++i)
        raw.data.data()[i] = static_cast<T>(rng.uniform01());
    return raw;
}

nn::ArchitectureSpec tiny_arch(int levels = 1, int base = 4) {
    nn::ArchitectureSpec spec;
    spec.levels = levels;
    spec.base_channels = base;
    return spec;
}

// parameter-count oracle built from the topology description alone
size_t expected_unet_params(const nn::ArchitectureSpec& s, int cin, int cout) {
    auto conv = [](int ci, int co, int k) { return static_cast<size_t>(ci) * co * k * k + co; };
    const int L = s.levels, k = s.kernel_size;
    auto w = [&](int i) { return s.base_channels << i; };
    size_t n = 0;
    int prev = cin;
    for (int i = 0; i < L; ++i) {
        n += conv(prev, w(i), k) + conv(w(i), w(i), k);
        prev = w(i);
    }
    n += conv(w(L - 1), w(L), k) + conv(w(L), w(L), k);
    for (int i = L - 1; i >= 0; --i)
        n += conv(w(i + 1), w(i), k) + conv(2 * w(i), w(i), k) + conv(w(i), w(i), k);
    n += conv(s.base_channels, cout, 1);
    return n;
}

}  // namespace

TEST_CASE("zero-residual networks reproduce the bilinear baseline exactly") {
    Rng rng(51);
    CpfaRaw<double> raw = random_raw<double>(rng, 16, 16);
    Image<double> base = bilinear_baseline(raw);

    // zero-initialized final projections -> every refinement is the identity
    auto two = DemosaickModel<double>::two_step(tiny_arch(2, 6), raw.pattern, 99, true);
    Image<double> out = tcpdnet_forward(raw, two);
    REQUIRE(out.same_shape(base));
    for (size_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == base.data()[i]);

    auto single = DemosaickModel<double>::single_step(tiny_arch(2, 6), raw.pattern, 99, true);
    Image<double> out2 = single_step_forward(raw, single);
    for (size_t i = 0; i < out2.size(); ++i) CHECK(out2.data()[i] == base.data()[i]);
}

TEST_CASE("two-step forward: shape and determinism") {
    Rng rng(52);
    CpfaRaw<float> raw = random_raw<float>(rng, 16, 24);
    auto model = DemosaickModel<float>::two_step(tiny_arch(1, 4), raw.pattern, 5, false);
    Image<float> a = tcpdnet_forward(raw, model);
    CHECK(a.channels() == kCubeChannels);
    CHECK(a.height() == 16);
    CHECK(a.width() == 24);
    Image<float> b = tcpdnet_forward(raw, model);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("shared color weights: identical mosaics give identical outputs") {
    // constant raw -> all four orientation mosaics coincide, so one shared
    // parameter set must produce four identical refined images
    CpfaRaw<float> raw{Image<float>(1, 16, 16, 0.3f), CpfaPattern::standard()};
    auto model = DemosaickModel<float>::two_step(tiny_arch(1, 4), raw.pattern, 7, false);
    nn::Workspace<float> ws;
    OrientedRgb<float> first =
        color_demosaick(subsample_orientation(raw, Orientation::Deg0), model.color_net, ws);
    for (Orientation o : {Orientation::Deg45, Orientation::Deg90, Orientation::Deg135}) {
        OrientedRgb<float> other =
            color_demosaick(subsample_orientation(raw, o), model.color_net, ws);
        for (size_t i = 0; i < first.data.size(); ++i)
            CHECK(other.data.data()[i] == first.data.data()[i]);
    }
}

TEST_CASE("refine_image pads and crops arbitrary sizes") {
    nn::ArchitectureSpec spec = tiny_arch(2, 4);
    nn::UNet<float> net(spec, 3, 3);
    Rng rng(53);
    net.init(rng, false);
    nn::Workspace<float> ws;
    Image<float> img(3, 10, 14);  // not divisible by 4
    for (size_t i = 0; i < img.size(); ++i) img.data()[i] = static_cast<float>(rng.uniform01());
    Image<float> out = refine_image(net, img, ws);
    CHECK(out.channels() == 3);
    CHECK(out.height() == 10);
    CHECK(out.width() == 14);
    for (size_t i = 0; i < out.size(); ++i) CHECK(std::isfinite(out.data()[i]));
}

TEST_CASE("parameter counts match the topology oracle; single-step within 2x") {
    const nn::ArchitectureSpec dflt;  // 3 levels, base 32
    auto two = DemosaickModel<float>::two_step(dflt, CpfaPattern::standard(), 1);
    auto single = DemosaickModel<float>::single_step(dflt, CpfaPattern::standard(), 1);
    CHECK(two.color_net.parameter_count() == expected_unet_params(dflt, 3, 3));
    CHECK(two.polar_net.parameter_count() == expected_unet_params(dflt, 4, 4));
    CHECK(single.joint_net.parameter_count() == expected_unet_params(dflt, 12, 12));

    const double ratio = static_cast<double>(two.parameter_count()) /
                         static_cast<double>(single.parameter_count());
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("checkpoint round trip is bit-exact and validates the architecture") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "tcpd_ckpt_test";
    fs::create_directories(dir);
    const std::string path = (dir / "m.ckpt").string();

    auto model = DemosaickModel<float>::two_step(tiny_arch(2, 6), CpfaPattern::standard(), 17,
                                                 false);
    save_checkpoint(model, path);
    DemosaickModel<float> loaded = load_checkpoint(path);
    CHECK(loaded.kind == ModelKind::TwoStep);
    CHECK(loaded.arch == model.arch);
    CHECK(loaded.pattern == model.pattern);
    auto a = model_parameters(model);
    auto b = model_parameters(loaded);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        REQUIRE(a[i].values->size() == b[i].values->size());
        for (size_t j = 0; j < a[i].values->size(); ++j)
            CHECK((*a[i].values)[j] == (*b[i].values)[j]);
    }

    // expected-architecture validation
    CHECK_THROWS_AS(load_checkpoint(path, tiny_arch(1, 4)), IoError);
    CHECK_NOTHROW(load_checkpoint(path, tiny_arch(2, 6)));
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/m.ckpt"), IoError);

    // truncated file
    fs::resize_file(path, fs::file_size(path) / 2);
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
    fs::remove_all(dir);
}

TEST_CASE("translation covariance by one full pattern period") {
    // periodic shift by (4,4) must shift the output identically away from
    // the borders; the margin covers the chained receptive field (the color
    // net sees ~24 raw pixels through the half-res stage, the polarization
    // net another ~14)
    Rng rng(54);
    const int H = 96, W = 96, S = 4, margin = 40;
    CpfaRaw<double> raw = random_raw<double>(rng, H, W);
    auto model = DemosaickModel<double>::two_step(tiny_arch(1, 4), raw.pattern, 23, false);

    CpfaRaw<double> shifted{Image<double>(1, H, W), raw.pattern};
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            shifted.data.at(0, y, x) = raw.data.at(0, (y + S) % H, (x + S) % W);

    Image<double> out = tcpdnet_forward(raw, model);
    Image<double> out_shifted = tcpdnet_forward(shifted, model);

    for (int c = 0; c < kCubeChannels; ++c)
        for (int y = margin; y < H - margin - S; ++y)
            for (int x = margin; x < W - margin - S; ++x)
                CHECK(out_shifted.at(c, y, x) ==
                      doctest::Approx(out.at(c, y + S, x + S)).epsilon(1e-10));
}
