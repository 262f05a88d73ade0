// Command-line front end; all pipeline work goes through the C API in tcpd.h.
#include <tcpd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int rc_to_exit(tcpd_rc rc) {
    switch (rc) {
        case TCPD_RC_OK: return 0;
        case TCPD_RC_INVALID_ARGUMENT: return 1;
        case TCPD_RC_DATA_ERROR: return 2;
        case TCPD_RC_NUMERIC_ERROR: return 3;
        default: return 2;
    }
}

[[noreturn]] void die(tcpd_rc rc) {
    std::cerr << "error: " << tcpd_last_error() << "\n";
    std::exit(rc_to_exit(rc));
}

void check(tcpd_rc rc) {
    if (rc != TCPD_RC_OK) die(rc);
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    tcpd_string_free(s);
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        std::cerr << "error: cannot open " << path << "\n";
        std::exit(2);
    }
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// --dataset falls back to $TCPD_DATASET_ROOT
std::string resolve_dataset(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("TCPD_DATASET_ROOT")) return env;
    std::cerr << "error: no dataset given (use --dataset or TCPD_DATASET_ROOT)\n";
    std::exit(1);
}

struct PatternHandle {
    tcpd_pattern_t* p = nullptr;
    ~PatternHandle() { tcpd_pattern_destroy(p); }
};

// --pattern FILE (JSON descriptor) or the standard layout
void load_pattern(const std::string& pattern_path, PatternHandle& h) {
    if (pattern_path.empty()) {
        check(tcpd_pattern_standard(&h.p));
    } else {
        check(tcpd_pattern_from_json(read_text_file(pattern_path).c_str(), &h.p));
    }
}

std::vector<std::string> list_scene_dirs(const std::string& root) {
    std::vector<std::string> ids;
    if (!fs::is_directory(root)) {
        std::cerr << "error: dataset root is not a directory: " << root << "\n";
        std::exit(2);
    }
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory() && fs::exists(e.path() / "i000.png"))
            ids.push_back(e.path().filename().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

int cmd_synthesize(const std::string& dataset, const std::string& out,
                   const std::string& pattern_path) {
    PatternHandle pattern;
    load_pattern(pattern_path, pattern);
    fs::create_directories(out);
    const std::vector<std::string> ids = list_scene_dirs(dataset);
    if (ids.empty()) {
        std::cerr << "error: no scenes under " << dataset << "\n";
        return 2;
    }
    for (const std::string& id : ids) {
        tcpd_cube_t* cube = nullptr;
        check(tcpd_cube_load_scene((fs::path(dataset) / id).string().c_str(), &cube));
        tcpd_raw_t* raw = nullptr;
        tcpd_rc rc = tcpd_raw_synthesize(cube, pattern.p, &raw);
        tcpd_cube_destroy(cube);
        check(rc);
        const std::string png = (fs::path(out) / (id + ".png")).string();
        const std::string sidecar = (fs::path(out) / (id + ".json")).string();
        rc = tcpd_raw_save(raw, png.c_str(), sidecar.c_str());
        tcpd_raw_destroy(raw);
        check(rc);
        std::cout << id << " -> " << png << "\n";
    }
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& dataset, const std::string& out,
              std::optional<uint64_t> seed, std::optional<long long> iterations,
              const std::string& method) {
    nlohmann::json cfg = nlohmann::json::object();
    std::string dataset_root = dataset;
    std::string out_dir = out;
    if (!config_path.empty()) {
        try {
            cfg = nlohmann::json::parse(read_text_file(config_path));
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: " << config_path << ": " << e.what() << "\n";
            return 1;
        }
        // paths may live in the config file; flags win
        if (dataset_root.empty() && cfg.contains("dataset_root"))
            dataset_root = cfg["dataset_root"].get<std::string>();
        if (out_dir.empty() && cfg.contains("out_dir"))
            out_dir = cfg["out_dir"].get<std::string>();
        cfg.erase("dataset_root");
        cfg.erase("out_dir");
    }
    if (seed) cfg["seed"] = *seed;
    if (iterations) cfg["iterations"] = *iterations;
    if (!method.empty()) cfg["method"] = method;
    dataset_root = resolve_dataset(dataset_root);
    if (out_dir.empty()) out_dir = "train_out";

    char* summary = nullptr;
    check(tcpd_train(cfg.dump().c_str(), dataset_root.c_str(), out_dir.c_str(), &summary));
    std::cout << take_string(summary) << "\n";
    return 0;
}

int cmd_demosaick(const std::string& raw_path, std::string sidecar, const std::string& method,
                  const std::string& checkpoint, const std::string& out, bool visualize) {
    if (sidecar.empty()) sidecar = fs::path(raw_path).replace_extension(".json").string();
    tcpd_raw_t* raw = nullptr;
    check(tcpd_raw_load(raw_path.c_str(), sidecar.c_str(), &raw));

    tcpd_model_t* model = nullptr;
    if (!checkpoint.empty()) check(tcpd_model_load(checkpoint.c_str(), &model));
    tcpd_cube_t* cube = nullptr;
    tcpd_rc rc = tcpd_demosaick(raw, method.c_str(), model, &cube);
    tcpd_raw_destroy(raw);
    tcpd_model_destroy(model);
    check(rc);

    const std::string prefix = fs::path(raw_path).stem().string() + "_";
    rc = tcpd_cube_write_orientation_pngs(cube, out.c_str(), prefix.c_str());
    if (rc == TCPD_RC_OK && visualize)
        rc = tcpd_cube_write_views(cube, out.c_str(), prefix.c_str());
    tcpd_cube_destroy(cube);
    check(rc);
    std::cout << "wrote " << out << "/" << prefix << "i*.png\n";
    return 0;
}

int cmd_eval(const std::string& dataset, const std::string& out,
             const std::vector<std::string>& methods, const std::string& split, bool images) {
    nlohmann::json mj = nlohmann::json::array();
    for (const std::string& m : methods) {
        nlohmann::json entry;
        const size_t eq = m.find('=');
        if (eq == std::string::npos) {
            entry["name"] = m;
        } else {
            entry["name"] = m.substr(0, eq);
            entry["checkpoint"] = m.substr(eq + 1);
        }
        mj.push_back(entry);
    }
    char* report = nullptr;
    check(tcpd_evaluate(mj.dump().c_str(), resolve_dataset(dataset).c_str(), split.c_str(),
                        out.c_str(), images ? 1 : 0, &report));
    const std::string text = take_string(report);
    // short per-method summary on stdout; full tables land in out/
    nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& m : j["methods"]) {
        const auto& mean = m["mean"];
        std::cout << m["method"].get<std::string>() << ": s0="
                  << (mean["cpsnr_s0"].is_null() ? std::string("inf")
                                                 : std::to_string(mean["cpsnr_s0"].get<double>()))
                  << " dB, aop_err=" << mean["aop_error_deg"].get<double>() << " deg\n";
    }
    std::cout << "reports in " << out << "\n";
    return 0;
}

int cmd_visualize(const std::string& scene, const std::string& out) {
    tcpd_cube_t* cube = nullptr;
    check(tcpd_cube_load_scene(scene.c_str(), &cube));
    tcpd_rc rc = tcpd_cube_write_views(cube, out.c_str(), "");
    tcpd_cube_destroy(cube);
    check(rc);
    std::cout << "wrote s0/dop/aop/aopdop views to " << out << "\n";
    return 0;
}

int cmd_gen(const std::string& out, int scenes, int height, int width, uint64_t seed) {
    check(tcpd_generate_dataset(out.c_str(), scenes, height, width, seed));
    std::cout << "generated " << scenes << " scenes under " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("tcpd ") + tcpd_version() +
                 " - two-step color-polarization demosaicking"};
    app.require_subcommand(1);

    std::string dataset, out, pattern_path, config_path, raw_path, sidecar, checkpoint, scene;
    std::string method = "tcpdnet";
    std::string split = "test";
    std::vector<std::string> methods;
    bool visualize = false, images = false;
    std::optional<uint64_t> seed;
    std::optional<long long> iterations;
    int gen_scenes = 16, gen_h = 192, gen_w = 192;
    uint64_t gen_seed = 7;

    auto* synth = app.add_subcommand("synthesize", "Synthesize CPFA raw data for every scene");
    synth->add_option("--dataset", dataset, "Dataset root (or TCPD_DATASET_ROOT)");
    synth->add_option("--out", out, "Output directory")->required();
    synth->add_option("--pattern", pattern_path, "Pattern descriptor JSON file");

    auto* train = app.add_subcommand("train", "Train a demosaicking model");
    train->add_option("--config", config_path, "Training config JSON file");
    train->add_option("--dataset", dataset, "Dataset root (or TCPD_DATASET_ROOT)");
    train->add_option("--out", out, "Output directory for checkpoints and logs");
    train->add_option("--seed", seed, "Override the config seed");
    train->add_option("--iterations", iterations, "Override the iteration count");
    train->add_option("--method", method, "tcpdnet | single_step")->capture_default_str();

    auto* dm = app.add_subcommand("demosaick", "Demosaick a CPFA raw frame");
    dm->add_option("--raw", raw_path, "Raw 16-bit PNG")->required();
    dm->add_option("--sidecar", sidecar, "Pattern sidecar JSON (default: raw with .json)");
    dm->add_option("--method", method, "tcpdnet | single_step | bilinear")
        ->capture_default_str();
    dm->add_option("--checkpoint", checkpoint, "Model checkpoint (not needed for bilinear)");
    dm->add_option("--out", out, "Output directory")->required();
    dm->add_flag("--visualize", visualize, "Also write S0/DoP/AoP/AoP-DoP views");

    auto* ev = app.add_subcommand("eval", "Compare methods on a dataset split");
    ev->add_option("--dataset", dataset, "Dataset root (or TCPD_DATASET_ROOT)");
    ev->add_option("--out", out, "Report directory")->required();
    ev->add_option("--method", methods,
                   "Method name, or name=checkpoint.ckpt (repeatable)")
        ->required();
    ev->add_option("--split", split, "train | val | test | all")->capture_default_str();
    ev->add_flag("--images", images, "Emit per-scene S0/AoP-DoP/error images");

    auto* viz = app.add_subcommand("visualize", "Render views of a scene directory");
    viz->add_option("--scene", scene, "Scene directory (i000.png ... i135.png)")->required();
    viz->add_option("--out", out, "Output directory")->required();

    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen->add_option("--out", out, "Dataset root to create")->required();
    gen->add_option("--scenes", gen_scenes, "Scene count")->capture_default_str();
    gen->add_option("--height", gen_h, "Scene height")->capture_default_str();
    gen->add_option("--width", gen_w, "Scene width")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (synth->parsed()) return cmd_synthesize(resolve_dataset(dataset), out, pattern_path);
    if (train->parsed()) return cmd_train(config_path, dataset, out, seed, iterations, method);
    if (dm->parsed()) return cmd_demosaick(raw_path, sidecar, method, checkpoint, out, visualize);
    if (ev->parsed()) return cmd_eval(dataset, out, methods, split, images);
    if (viz->parsed()) return cmd_visualize(scene, out);
    if (gen->parsed()) return cmd_gen(out, gen_scenes, gen_h, gen_w, gen_seed);
    return 1;
}
