#include "tcpd.h"

#include <json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "tcpd/dataset.hpp"
#include "tcpd/metrics.hpp"
#include "tcpd/png_io.hpp"
#include "tcpd/polarization.hpp"
#include "tcpd/synthetic.hpp"
#include "tcpd/training.hpp"

namespace fs = std::filesystem;

namespace {

thread_local std::string g_last_error;

tcpd_rc fail(tcpd_rc rc, const std::string& message) {
    g_last_error = message;
    return rc;
}

template <typename Fn>
tcpd_rc guarded(Fn&& fn) {
    try {
        fn();
        return TCPD_RC_OK;
    } catch (const tcpd::InvalidInput& e) {
        return fail(TCPD_RC_INVALID_ARGUMENT, e.what());
    } catch (const tcpd::ConfigError& e) {
        return fail(TCPD_RC_INVALID_ARGUMENT, e.what());
    } catch (const tcpd::IoError& e) {
        return fail(TCPD_RC_DATA_ERROR, e.what());
    } catch (const tcpd::NumericError& e) {
        return fail(TCPD_RC_NUMERIC_ERROR, e.what());
    } catch (const std::exception& e) {
        return fail(TCPD_RC_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(TCPD_RC_INTERNAL_ERROR, "unknown error");
    }
}

void require(bool cond, const char* what) {
    if (!cond) throw tcpd::InvalidInput(what);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct tcpd_pattern_t {
    tcpd::CpfaPattern pattern;
};

struct tcpd_cube_t {
    tcpd::Image<double> cube;
};

struct tcpd_raw_t {
    tcpd::CpfaRaw<double> raw;
};

struct tcpd_model_t {
    tcpd::DemosaickModel<float> model;
};

extern "C" {

const char* tcpd_version(void) { return tcpd::kVersionString; }

const char* tcpd_last_error(void) { return g_last_error.c_str(); }

void tcpd_string_free(char* s) { std::free(s); }

tcpd_rc tcpd_pattern_standard(tcpd_pattern_t** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = new tcpd_pattern_t{tcpd::CpfaPattern::standard()};
    });
}

tcpd_rc tcpd_pattern_from_json(const char* json_text, tcpd_pattern_t** out) {
    return guarded([&] {
        require(json_text && out, "null argument");
        *out = new tcpd_pattern_t{tcpd::CpfaPattern::from_json(json_text)};
    });
}

tcpd_rc tcpd_pattern_to_json(const tcpd_pattern_t* pattern, char** json_out) {
    return guarded([&] {
        require(pattern && json_out, "null argument");
        *json_out = dup_string(pattern->pattern.to_json());
    });
}

void tcpd_pattern_destroy(tcpd_pattern_t* pattern) { delete pattern; }

tcpd_rc tcpd_cube_load_scene(const char* scene_dir, tcpd_cube_t** out) {
    return guarded([&] {
        require(scene_dir && out, "null argument");
        *out = new tcpd_cube_t{tcpd::load_scene_cube(scene_dir)};
    });
}

tcpd_rc tcpd_cube_save_scene(const tcpd_cube_t* cube, const char* scene_dir) {
    return guarded([&] {
        require(cube && scene_dir, "null argument");
        tcpd::save_scene_cube(scene_dir, cube->cube);
    });
}

tcpd_rc tcpd_cube_dims(const tcpd_cube_t* cube, int* height, int* width) {
    return guarded([&] {
        require(cube && height && width, "null argument");
        *height = cube->cube.height();
        *width = cube->cube.width();
    });
}

tcpd_rc tcpd_cube_read(const tcpd_cube_t* cube, double* buffer, size_t buffer_len) {
    return guarded([&] {
        require(cube && buffer, "null argument");
        require(buffer_len >= cube->cube.size(), "buffer too small");
        std::copy(cube->cube.data(), cube->cube.data() + cube->cube.size(), buffer);
    });
}

tcpd_rc tcpd_cube_create(const double* buffer, int height, int width, tcpd_cube_t** out) {
    return guarded([&] {
        require(buffer && out, "null argument");
        require(height > 0 && width > 0, "bad dimensions");
        tcpd::Image<double> img(tcpd::kCubeChannels, height, width);
        std::copy(buffer, buffer + img.size(), img.data());
        *out = new tcpd_cube_t{std::move(img)};
    });
}

tcpd_rc tcpd_cube_write_views(const tcpd_cube_t* cube, const char* out_dir, const char* prefix) {
    return guarded([&] {
        require(cube && out_dir, "null argument");
        const std::string pre = prefix ? prefix : "";
        fs::create_directories(out_dir);
        const auto base = fs::path(out_dir);
        tcpd::write_png((base / (pre + "s0.png")).string(), tcpd::s0_view(cube->cube));
        tcpd::Image<double> maps = tcpd::compute_aop_dop(
            tcpd::compute_stokes(tcpd::extract_channel(cube->cube, tcpd::ColorChannel::G)));
        tcpd::Image<double> aop(1, maps.height(), maps.width());
        tcpd::Image<double> dop(1, maps.height(), maps.width());
        for (size_t i = 0; i < maps.plane_size(); ++i) {
            aop.plane(0)[i] = maps.plane(0)[i] / 180.0;
            dop.plane(0)[i] = maps.plane(1)[i];
        }
        tcpd::write_png((base / (pre + "aop.png")).string(), aop);
        tcpd::write_png((base / (pre + "dop.png")).string(), dop);
        tcpd::write_png((base / (pre + "aopdop.png")).string(),
                        tcpd::visualize_aop_dop(maps));
    });
}

tcpd_rc tcpd_cube_write_orientation_pngs(const tcpd_cube_t* cube, const char* out_dir,
                                         const char* prefix) {
    return guarded([&] {
        require(cube && out_dir, "null argument");
        const std::string pre = prefix ? prefix : "";
        fs::create_directories(out_dir);
        for (tcpd::Orientation o : tcpd::kAllOrientations) {
            tcpd::Image<double> rgb(3, cube->cube.height(), cube->cube.width());
            for (tcpd::ColorChannel c : tcpd::kAllColors) {
                const double* src = cube->cube.plane(tcpd::cube_channel(o, c));
                std::copy(src, src + rgb.plane_size(), rgb.plane(static_cast<int>(c)));
            }
            tcpd::write_png((fs::path(out_dir) /
                             (pre + tcpd::kOrientationFileNames[static_cast<int>(o)]))
                                .string(),
                            rgb);
        }
    });
}

void tcpd_cube_destroy(tcpd_cube_t* cube) { delete cube; }

tcpd_rc tcpd_raw_synthesize(const tcpd_cube_t* cube, const tcpd_pattern_t* pattern,
                            tcpd_raw_t** out) {
    return guarded([&] {
        require(cube && pattern && out, "null argument");
        *out = new tcpd_raw_t{tcpd::synthesize_cpfa(cube->cube, pattern->pattern)};
    });
}

tcpd_rc tcpd_raw_load(const char* png_path, const char* sidecar_path, tcpd_raw_t** out) {
    return guarded([&] {
        require(png_path && sidecar_path && out, "null argument");
        *out = new tcpd_raw_t{tcpd::load_raw(png_path, sidecar_path)};
    });
}

tcpd_rc tcpd_raw_save(const tcpd_raw_t* raw, const char* png_path, const char* sidecar_path) {
    return guarded([&] {
        require(raw && png_path && sidecar_path, "null argument");
        tcpd::save_raw(raw->raw, png_path, sidecar_path);
    });
}

tcpd_rc tcpd_raw_dims(const tcpd_raw_t* raw, int* height, int* width) {
    return guarded([&] {
        require(raw && height && width, "null argument");
        *height = raw->raw.data.height();
        *width = raw->raw.data.width();
    });
}

tcpd_rc tcpd_raw_read(const tcpd_raw_t* raw, double* buffer, size_t buffer_len) {
    return guarded([&] {
        require(raw && buffer, "null argument");
        require(buffer_len >= raw->raw.data.size(), "buffer too small");
        std::copy(raw->raw.data.data(), raw->raw.data.data() + raw->raw.data.size(), buffer);
    });
}

void tcpd_raw_destroy(tcpd_raw_t* raw) { delete raw; }

tcpd_rc tcpd_model_load(const char* checkpoint_path, tcpd_model_t** out) {
    return guarded([&] {
        require(checkpoint_path && out, "null argument");
        *out = new tcpd_model_t{tcpd::load_checkpoint(checkpoint_path)};
    });
}

tcpd_rc tcpd_model_create(const char* kind, const char* arch_json, const tcpd_pattern_t* pattern,
                          uint64_t seed, tcpd_model_t** out) {
    return guarded([&] {
        require(kind && pattern && out, "null argument");
        tcpd::nn::ArchitectureSpec arch;
        if (arch_json) arch = tcpd::nn::ArchitectureSpec::from_json(arch_json);
        const tcpd::ModelKind mk = tcpd::model_kind_from_name(kind);
        *out = new tcpd_model_t{
            mk == tcpd::ModelKind::TwoStep
                ? tcpd::DemosaickModel<float>::two_step(arch, pattern->pattern, seed)
                : tcpd::DemosaickModel<float>::single_step(arch, pattern->pattern, seed)};
    });
}

tcpd_rc tcpd_model_save(const tcpd_model_t* model, const char* checkpoint_path) {
    return guarded([&] {
        require(model && checkpoint_path, "null argument");
        tcpd::save_checkpoint(model->model, checkpoint_path);
    });
}

tcpd_rc tcpd_model_kind(const tcpd_model_t* model, char** kind_out) {
    return guarded([&] {
        require(model && kind_out, "null argument");
        *kind_out = dup_string(tcpd::model_kind_name(model->model.kind));
    });
}

void tcpd_model_destroy(tcpd_model_t* model) { delete model; }

tcpd_rc tcpd_demosaick(const tcpd_raw_t* raw, const char* method, const tcpd_model_t* model,
                       tcpd_cube_t** out) {
    return guarded([&] {
        require(raw && method && out, "null argument");
        const std::string m = method;
        if (m == "bilinear") {
            *out = new tcpd_cube_t{tcpd::bilinear_baseline(raw->raw)};
            return;
        }
        require(model != nullptr, "method requires a model checkpoint");
        const tcpd::ModelKind expected =
            m == "tcpdnet" ? tcpd::ModelKind::TwoStep
                           : (m == "single_step" ? tcpd::ModelKind::SingleStep
                                                 : throw tcpd::InvalidInput(
                                                       "unknown method \"" + m + "\""));
        if (model->model.kind != expected)
            throw tcpd::InvalidInput("checkpoint kind does not match method \"" + m + "\"");
        tcpd::CpfaRaw<float> raw_f{raw->raw.data.cast<float>(), raw->raw.pattern};
        *out = new tcpd_cube_t{tcpd::model_forward(raw_f, model->model).cast<double>()};
    });
}

tcpd_rc tcpd_train(const char* config_json, const char* dataset_root, const char* out_dir,
                   char** summary_json_out) {
    return guarded([&] {
        require(config_json && dataset_root && out_dir, "null argument");
        const tcpd::TrainConfig cfg = tcpd::TrainConfig::from_json(config_json);
        std::vector<tcpd::SceneRecord> scenes = tcpd::load_dataset(dataset_root);
        fs::create_directories(out_dir);
        std::ofstream log(fs::path(out_dir) / "train_log.jsonl");
        if (!log) throw tcpd::IoError(std::string("cannot create train_log.jsonl under ") +
                                      out_dir);
        tcpd::TrainResult result = tcpd::train_loop(cfg, scenes, out_dir, &log);
        if (summary_json_out) {
            nlohmann::json j;
            j["final_checkpoint"] = result.final_checkpoint;
            j["best_checkpoint"] = result.best_checkpoint;
            j["best_val_s0_cpsnr"] = result.best_val_s0_cpsnr;
            j["best_iteration"] = result.best_iteration;
            *summary_json_out = dup_string(j.dump());
        }
    });
}

tcpd_rc tcpd_evaluate(const char* methods_json, const char* dataset_root, const char* split,
                      const char* out_dir, int emit_images, char** report_json_out) {
    return guarded([&] {
        require(methods_json && dataset_root && out_dir, "null argument");
        nlohmann::json mj;
        try {
            mj = nlohmann::json::parse(methods_json);
        } catch (const nlohmann::json::exception& e) {
            throw tcpd::InvalidInput(std::string("methods: invalid JSON: ") + e.what());
        }
        std::vector<tcpd::MethodSpec> methods;
        for (const auto& m : mj) {
            tcpd::MethodSpec spec;
            spec.name = m.at("name").get<std::string>();
            if (m.contains("checkpoint") && !m["checkpoint"].is_null())
                spec.model = tcpd::load_checkpoint(m["checkpoint"].get<std::string>());
            methods.push_back(std::move(spec));
        }
        const std::string want = split ? split : "test";
        std::vector<tcpd::SceneRecord> scenes = tcpd::load_dataset(dataset_root);
        std::vector<tcpd::EvalScene> eval_scenes;
        for (auto& s : scenes)
            if (want == "all" || s.split == want)
                eval_scenes.push_back({s.id, s.cube.cast<double>()});
        if (eval_scenes.empty())
            throw tcpd::ConfigError("no scenes in split \"" + want + "\"");
        tcpd::ReportOptions opts;
        opts.out_dir = out_dir;
        opts.emit_images = emit_images != 0;
        std::vector<tcpd::MethodEvalResult> results =
            tcpd::compare_methods(methods, eval_scenes, opts);
        if (report_json_out) *report_json_out = dup_string(tcpd::metrics_to_json(results));
    });
}

tcpd_rc tcpd_metrics(const tcpd_cube_t* pred, const tcpd_cube_t* truth,
                     char** metrics_json_out) {
    return guarded([&] {
        require(pred && truth && metrics_json_out, "null argument");
        tcpd::MetricsRecord r = tcpd::evaluate_scene(pred->cube, truth->cube);
        std::vector<tcpd::MethodEvalResult> tmp(1);
        tmp[0].method = "";
        tmp[0].per_scene = {r};
        tmp[0].mean = r;
        nlohmann::json j = nlohmann::json::parse(tcpd::metrics_to_json(tmp));
        *metrics_json_out = dup_string(j["methods"][0]["scenes"][0].dump());
    });
}

tcpd_rc tcpd_generate_dataset(const char* root, int n_scenes, int height, int width,
                              uint64_t seed) {
    return guarded([&] {
        require(root != nullptr, "null argument");
        tcpd::generate_synthetic_dataset(root, n_scenes, height, width, seed);
    });
}

}  // extern "C"
