#include "tcpd/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tcpd/png_io.hpp"
#include "tcpd/polarization.hpp"

namespace fs = std::filesystem;

namespace tcpd {

double cpsnr(const Image<double>& pred, const Image<double>& truth, double peak) {
    require_same_shape(pred, truth, "cpsnr");
    if (pred.size() == 0) throw InvalidInput("cpsnr: empty image");
    if (!(peak > 0.0)) throw InvalidInput("cpsnr: peak must be positive");
    double sse = 0.0;
    const double* p = pred.data();
    const double* t = truth.data();
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = p[i] - t[i];
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(pred.size());
    return 10.0 * std::log10(peak * peak / mse);
}

namespace {

Image<double> orientation_rgb(const Image<double>& cube, Orientation o) {
    Image<double> rgb(3, cube.height(), cube.width());
    for (ColorChannel c : kAllColors) {
        const double* src = cube.plane(cube_channel(o, c));
        std::copy(src, src + cube.plane_size(), rgb.plane(static_cast<int>(c)));
    }
    return rgb;
}

Image<double> stokes_component(const Image<double>& cube, int comp, double scale) {
    // per-color Stokes, one plane per color channel
    Image<double> out(kColors, cube.height(), cube.width());
    for (ColorChannel c : kAllColors) {
        Image<double> s = compute_stokes(extract_channel(cube, c));
        const double* src = s.plane(comp);
        double* dst = out.plane(static_cast<int>(c));
        for (size_t i = 0; i < out.plane_size(); ++i) dst[i] = scale * src[i];
    }
    return out;
}

Image<double> dop_planes(const Image<double>& cube) {
    Image<double> out(kColors, cube.height(), cube.width());
    for (ColorChannel c : kAllColors) {
        Image<double> m = compute_aop_dop(compute_stokes(extract_channel(cube, c)));
        const double* src = m.plane(1);
        std::copy(src, src + out.plane_size(), out.plane(static_cast<int>(c)));
    }
    return out;
}

Image<double> green_aop(const Image<double>& cube) {
    Image<double> m = compute_aop_dop(compute_stokes(extract_channel(cube, ColorChannel::G)));
    Image<double> aop(1, cube.height(), cube.width());
    std::copy(m.plane(0), m.plane(0) + m.plane_size(), aop.plane(0));
    return aop;
}

void append_value(std::ostream& os, double v) {
    if (std::isinf(v)) {
        os << "inf";
    } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        os << buf;
    }
}

nlohmann::json record_to_json(const MetricsRecord& r) {
    nlohmann::json j;
    j["scene"] = r.scene_id;
    j["method"] = r.method_id;
    auto put = [&](const char* key, double v) {
        if (std::isinf(v)) {
            j[key] = nullptr;
            j[std::string(key) + "_infinite"] = true;
        } else {
            j[key] = v;
        }
    };
    put("cpsnr_i0", r.cpsnr_intensity[0]);
    put("cpsnr_i45", r.cpsnr_intensity[1]);
    put("cpsnr_i90", r.cpsnr_intensity[2]);
    put("cpsnr_i135", r.cpsnr_intensity[3]);
    put("cpsnr_s0", r.cpsnr_s0);
    put("cpsnr_s1", r.cpsnr_s1);
    put("cpsnr_s2", r.cpsnr_s2);
    put("cpsnr_dop", r.cpsnr_dop);
    j["aop_error_deg"] = r.aop_error_deg;
    return j;
}

}  // namespace

MetricsRecord evaluate_scene(const Image<double>& pred_cube, const Image<double>& truth_cube) {
    require_same_shape(pred_cube, truth_cube, "evaluate_scene");
    if (pred_cube.channels() != kCubeChannels)
        throw InvalidInput("evaluate_scene: expected 12-channel cubes");
    MetricsRecord r;
    for (Orientation o : kAllOrientations)
        r.cpsnr_intensity[static_cast<int>(o)] =
            cpsnr(orientation_rgb(pred_cube, o), orientation_rgb(truth_cube, o), 1.0);
    r.cpsnr_s0 = cpsnr(stokes_component(pred_cube, 0, 0.5), stokes_component(truth_cube, 0, 0.5),
                       1.0);
    r.cpsnr_s1 = cpsnr(stokes_component(pred_cube, 1, 1.0), stokes_component(truth_cube, 1, 1.0),
                       2.0);
    r.cpsnr_s2 = cpsnr(stokes_component(pred_cube, 2, 1.0), stokes_component(truth_cube, 2, 1.0),
                       2.0);
    r.cpsnr_dop = cpsnr(dop_planes(pred_cube), dop_planes(truth_cube), 1.0);
    r.aop_error_deg = angle_error_degrees(green_aop(pred_cube), green_aop(truth_cube));
    return r;
}

MetricsRecord mean_record(const std::vector<MetricsRecord>& records) {
    if (records.empty()) throw InvalidInput("mean_record: no records");
    MetricsRecord m;
    m.scene_id = "mean";
    m.method_id = records.front().method_id;
    for (const auto& r : records) {
        for (int i = 0; i < kOrientations; ++i) m.cpsnr_intensity[i] += r.cpsnr_intensity[i];
        m.cpsnr_s0 += r.cpsnr_s0;
        m.cpsnr_s1 += r.cpsnr_s1;
        m.cpsnr_s2 += r.cpsnr_s2;
        m.cpsnr_dop += r.cpsnr_dop;
        m.aop_error_deg += r.aop_error_deg;
    }
    const double n = static_cast<double>(records.size());
    for (int i = 0; i < kOrientations; ++i) m.cpsnr_intensity[i] /= n;
    m.cpsnr_s0 /= n;
    m.cpsnr_s1 /= n;
    m.cpsnr_s2 /= n;
    m.cpsnr_dop /= n;
    m.aop_error_deg /= n;
    return m;
}

Image<double> s0_view(const Image<double>& cube) {
    Image<double> rgb(3, cube.height(), cube.width());
    for (ColorChannel c : kAllColors) {
        Image<double> s = compute_stokes(extract_channel(cube, c));
        const double* s0 = s.plane(0);
        double* dst = rgb.plane(static_cast<int>(c));
        for (size_t i = 0; i < rgb.plane_size(); ++i) dst[i] = 0.5 * s0[i];
    }
    return rgb;
}

Image<double> aop_dop_view(const Image<double>& cube) {
    return visualize_aop_dop(
        compute_aop_dop(compute_stokes(extract_channel(cube, ColorChannel::G))));
}

Image<double> s0_error_view(const Image<double>& cube, const Image<double>& truth) {
    Image<double> a = s0_view(cube);
    Image<double> b = s0_view(truth);
    Image<double> err(1, cube.height(), cube.width());
    for (size_t i = 0; i < err.plane_size(); ++i) {
        double e = 0.0;
        for (int c = 0; c < 3; ++c) e += std::fabs(a.plane(c)[i] - b.plane(c)[i]);
        // x10 gain so small demosaicking errors stay visible
        err.plane(0)[i] = std::min(1.0, e * (10.0 / 3.0));
    }
    return err;
}

std::vector<MethodEvalResult> compare_methods(const std::vector<MethodSpec>& methods,
                                              const std::vector<EvalScene>& scenes,
                                              const ReportOptions& opts) {
    if (methods.empty()) throw InvalidInput("compare_methods: no methods");
    if (scenes.empty()) throw InvalidInput("compare_methods: no scenes");
    const CpfaPattern pattern = opts.pattern ? *opts.pattern : CpfaPattern::standard();
    if (!opts.out_dir.empty()) fs::create_directories(opts.out_dir);

    std::vector<MethodEvalResult> results;
    for (const auto& method : methods) {
        MethodEvalResult res;
        res.method = method.name;
        for (const auto& scene : scenes) {
            const CpfaPattern& pat = method.model ? method.model->pattern : pattern;
            CpfaRaw<double> raw = synthesize_cpfa(scene.truth, pat);
            Image<double> pred;
            if (method.model) {
                CpfaRaw<float> raw_f{raw.data.cast<float>(), pat};
                pred = model_forward(raw_f, *method.model).cast<double>();
            } else {
                pred = bilinear_baseline(raw);
            }
            MetricsRecord rec = evaluate_scene(pred, scene.truth);
            rec.scene_id = scene.id;
            rec.method_id = method.name;
            res.per_scene.push_back(rec);

            if (opts.emit_images && !opts.out_dir.empty()) {
                const fs::path base = fs::path(opts.out_dir) / (scene.id + "_" + method.name);
                write_png(base.string() + "_s0.png", s0_view(pred));
                write_png(base.string() + "_aopdop.png", aop_dop_view(pred));
                write_png(base.string() + "_s0err.png", s0_error_view(pred, scene.truth));
            }
        }
        res.mean = mean_record(res.per_scene);
        results.push_back(std::move(res));
    }

    if (!opts.out_dir.empty()) {
        std::ofstream csv(fs::path(opts.out_dir) / "report.csv");
        csv << metrics_to_csv(results);
        std::ofstream js(fs::path(opts.out_dir) / "report.json");
        js << metrics_to_json(results) << "\n";
        if (!csv || !js) throw IoError("failed writing reports under " + opts.out_dir);
    }
    return results;
}

std::string metrics_to_csv(const std::vector<MethodEvalResult>& results) {
    std::ostringstream os;
    os << "method,scene,cpsnr_i0,cpsnr_i45,cpsnr_i90,cpsnr_i135,"
          "cpsnr_s0,cpsnr_s1,cpsnr_s2,cpsnr_dop,aop_error_deg\n";
    auto row = [&os](const MetricsRecord& r) {
        os << r.method_id << "," << r.scene_id;
        const double vals[] = {r.cpsnr_intensity[0], r.cpsnr_intensity[1], r.cpsnr_intensity[2],
                               r.cpsnr_intensity[3], r.cpsnr_s0,           r.cpsnr_s1,
                               r.cpsnr_s2,           r.cpsnr_dop,          r.aop_error_deg};
        for (double v : vals) {
            os << ",";
            append_value(os, v);
        }
        os << "\n";
    };
    for (const auto& res : results) {
        for (const auto& r : res.per_scene) row(r);
        row(res.mean);
    }
    return os.str();
}

std::string metrics_to_json(const std::vector<MethodEvalResult>& results) {
    nlohmann::json j;
    j["schema"] = "tcpd-report-v1";
    j["methods"] = nlohmann::json::array();
    for (const auto& res : results) {
        nlohmann::json m;
        m["method"] = res.method;
        m["scenes"] = nlohmann::json::array();
        for (const auto& r : res.per_scene) m["scenes"].push_back(record_to_json(r));
        m["mean"] = record_to_json(res.mean);
        j["methods"].push_back(std::move(m));
    }
    return j.dump(2);
}

}  // namespace tcpd
