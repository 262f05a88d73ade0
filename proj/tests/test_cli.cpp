#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "tcpd/dataset.hpp"
#include "tcpd/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(TCPD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli: synthesize, demosaick, eval, visualize, gen") {
    const std::string root = "/tmp/tcpd_cli_test";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string data = root + "/data";

    CHECK(run("gen --out " + data + " --scenes 3 --height 32 --width 32 --seed 4") == 0);
    CHECK(fs::exists(data + "/scene002/i135.png"));
    CHECK(fs::exists(data + "/splits.json"));

    CHECK(run("synthesize --dataset " + data + " --out " + root + "/raw") == 0);
    CHECK(fs::exists(root + "/raw/scene000.png"));
    CHECK(fs::exists(root + "/raw/scene000.json"));

    // bit-exact re-run
    auto before = fs::file_size(root + "/raw/scene000.png");
    CHECK(run("synthesize --dataset " + data + " --out " + root + "/raw") == 0);
    CHECK(fs::file_size(root + "/raw/scene000.png") == before);

    CHECK(run("demosaick --raw " + root + "/raw/scene000.png --method bilinear --out " + root +
              "/dm --visualize") == 0);
    CHECK(fs::exists(root + "/dm/scene000_i000.png"));
    CHECK(fs::exists(root + "/dm/scene000_s0.png"));

    CHECK(run("eval --dataset " + data + " --out " + root + "/rep --method bilinear "
              "--split all") == 0);
    CHECK(fs::exists(root + "/rep/report.csv"));
    CHECK(fs::exists(root + "/rep/report.json"));

    CHECK(run("visualize --scene " + data + "/scene001 --out " + root + "/viz") == 0);
    CHECK(fs::exists(root + "/viz/aopdop.png"));

    // dataset root via environment variable
    setenv("TCPD_DATASET_ROOT", data.c_str(), 1);
    CHECK(run("eval --out " + root + "/rep2 --method bilinear --split all") == 0);
    unsetenv("TCPD_DATASET_ROOT");

    fs::remove_all(root);
}

TEST_CASE("cli: train smoke run with config file and overrides") {
    const std::string root = "/tmp/tcpd_cli_train";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string data = root + "/data";
    tcpd::generate_synthetic_dataset(data, 9, 32, 32, 31);

    std::ofstream(root + "/cfg.json")
        << R"({"patch_size":16,"iterations":8,"seed":3,
               "arch":{"levels":1,"base_channels":4},
               "log_every":1,"val_every":8,
               "dataset_root":")" << data << R"(","out_dir":")" << root << R"(/run"})";
    CHECK(run("train --config " + root + "/cfg.json --iterations 4") == 0);
    CHECK(fs::exists(root + "/run/final.ckpt"));

    CHECK(run("demosaick --raw missing.png --method bilinear --out " + root + "/x") == 2);
    CHECK(run("train --config " + root + "/does_not_exist.json") == 2);
    CHECK(run("frobnicate") == 1);
    CHECK(run("eval --out x") == 1);  // missing required --method
    CHECK(run("--help") == 0);

    fs::remove_all(root);
}
