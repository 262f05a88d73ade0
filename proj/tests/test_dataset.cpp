#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tcpd/dataset.hpp"
#include "tcpd/png_io.hpp"
#include "tcpd/rng.hpp"
#include "tcpd/synthetic.hpp"

using namespace tcpd;
namespace fs = std::filesystem;

namespace {

Image<double> quantized_random(Rng& rng, int c, int h, int w) {
    Image<double> img(c, h, w);
    for (size_t i = 0; i < img.size(); ++i)
        img.data()[i] = std::round(rng.uniform01() * 65535.0) / 65535.0;
    return img;
}

}  // namespace

TEST_CASE("16-bit png round trip") {
    Rng rng(91);
    const std::string dir = "/tmp/tcpd_png_test";
    fs::create_directories(dir);

    for (int channels : {1, 3}) {
        Image<double> img(channels, 6, 9);
        for (size_t i = 0; i < img.size(); ++i) img.data()[i] = rng.uniform01();
        const std::string path = dir + "/t.png";
        write_png(path, img);
        Image<double> back = read_png(path);
        REQUIRE(back.same_shape(img));
        for (size_t i = 0; i < img.size(); ++i)
            CHECK(std::fabs(back.data()[i] - img.data()[i]) <= 0.5 / 65535.0 + 1e-12);

        // 16-bit-grid values survive exactly
        Image<double> q = quantized_random(rng, channels, 4, 4);
        write_png(path, q);
        back = read_png(path);
        for (size_t i = 0; i < q.size(); ++i) CHECK(back.data()[i] == q.data()[i]);
    }
    CHECK_THROWS_AS(read_png(dir + "/missing.png"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("scene save/load round trip") {
    Rng rng(92);
    const std::string dir = "/tmp/tcpd_scene_test";
    fs::remove_all(dir);
    Image<double> cube = quantized_random(rng, kCubeChannels, 8, 8);
    save_scene_cube(dir + "/sceneA", cube);
    for (const char* name : {"i000.png", "i045.png", "i090.png", "i135.png"})
        CHECK(fs::exists(dir + "/sceneA/" + name));
    Image<double> back = load_scene_cube(dir + "/sceneA");
    REQUIRE(back.same_shape(cube));
    for (size_t i = 0; i < cube.size(); ++i) CHECK(back.data()[i] == cube.data()[i]);

    // corrupt scene: missing one orientation
    fs::remove(dir + "/sceneA/i090.png");
    CHECK_THROWS_AS(load_scene_cube(dir + "/sceneA"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("dataset splits: explicit file and default rule") {
    const std::string root = "/tmp/tcpd_dataset_test";
    fs::remove_all(root);
    generate_synthetic_dataset(root, 10, 16, 16, 3);

    // splits.json written by the generator: 2 test, 2 val, 6 train
    auto scenes = load_dataset(root);
    REQUIRE(scenes.size() == 10);
    int n_train = 0, n_val = 0, n_test = 0;
    for (const auto& s : scenes) {
        if (s.split == "train") ++n_train;
        if (s.split == "val") ++n_val;
        if (s.split == "test") ++n_test;
        CHECK(s.cube.channels() == kCubeChannels);
    }
    CHECK(n_train == 6);
    CHECK(n_val == 2);
    CHECK(n_test == 2);

    // default rule without splits.json gives the same proportions
    fs::remove(root + "/splits.json");
    scenes = load_dataset(root);
    n_train = n_val = n_test = 0;
    for (const auto& s : scenes) {
        if (s.split == "train") ++n_train;
        if (s.split == "val") ++n_val;
        if (s.split == "test") ++n_test;
    }
    CHECK(n_train == 6);
    CHECK(n_val == 2);
    CHECK(n_test == 2);

    // a scene listed in two splits is rejected
    std::ofstream(root + "/splits.json")
        << R"({"train":["scene000","scene001","scene002","scene003","scene004",
                "scene005","scene006","scene007","scene008","scene009"],
           "val":["scene000"],"test":[]})";
    CHECK_THROWS_AS(load_dataset(root), ConfigError);
    fs::remove_all(root);
}

TEST_CASE("synthetic scenes are deterministic in their seed") {
    Image<double> a = synthesize_scene(1234, 16, 16);
    Image<double> b = synthesize_scene(1234, 16, 16);
    Image<double> c = synthesize_scene(1235, 16, 16);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
    bool any_diff = false;
    for (size_t i = 0; i < a.size(); ++i) any_diff |= (a.data()[i] != c.data()[i]);
    CHECK(any_diff);

    // all intensities valid and consistent with a physical polarization state
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.data()[i] >= 0.0);
        CHECK(a.data()[i] <= 1.0);
    }
}

TEST_CASE("raw save/load with sidecar") {
    Rng rng(93);
    const std::string dir = "/tmp/tcpd_raw_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    Image<double> cube = quantized_random(rng, kCubeChannels, 8, 8);
    CpfaRaw<double> raw = synthesize_cpfa(cube, CpfaPattern::standard());
    save_raw(raw, dir + "/r.png", dir + "/r.json");
    CpfaRaw<double> back = load_raw(dir + "/r.png", dir + "/r.json");
    CHECK(back.pattern == raw.pattern);
    for (size_t i = 0; i < raw.data.size(); ++i)
        CHECK(back.data.data()[i] == raw.data.data()[i]);

    // sidecar dimension mismatch
    std::ofstream(dir + "/bad.json") << R"({"format":"cpfa-raw","height":4,"width":4,
        "pattern":)" << CpfaPattern::standard().to_json() << "}";
    CHECK_THROWS_AS(load_raw(dir + "/r.png", dir + "/bad.json"), IoError);
    CHECK_THROWS_AS(load_raw(dir + "/r.png", dir + "/missing.json"), IoError);
    fs::remove_all(dir);
}
