#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcpd/image.hpp"
#include "tcpd/model.hpp"

namespace tcpd {

// 10*log10(peak^2 / MSE) with the MSE pooled over all channels and pixels.
// Identical inputs return +infinity.
double cpsnr(const Image<double>& pred, const Image<double>& truth, double peak);

// One row of the comparison table. Stokes images are computed per color
// channel; S0 is scored as S0/2 against peak 1, S1/S2 on raw values against
// peak 2, DoP against peak 1. The AoP error is the mean wrapped angle
// difference on the green channel's Stokes vector.
struct MetricsRecord {
    std::string scene_id;
    std::string method_id;
    double cpsnr_intensity[kOrientations] = {0, 0, 0, 0};  // I0, I45, I90, I135
    double cpsnr_s0 = 0, cpsnr_s1 = 0, cpsnr_s2 = 0, cpsnr_dop = 0;
    double aop_error_deg = 0;
};

MetricsRecord evaluate_scene(const Image<double>& pred_cube, const Image<double>& truth_cube);

// Mean across scenes, field by field (mean of per-scene CPSNRs, not CPSNR
// of pooled error).
MetricsRecord mean_record(const std::vector<MetricsRecord>& records);

// A method to compare: the fixed bilinear pipeline when model is empty.
struct MethodSpec {
    std::string name;
    std::optional<DemosaickModel<float>> model;
};

struct MethodEvalResult {
    std::string method;
    std::vector<MetricsRecord> per_scene;
    MetricsRecord mean;
};

struct ReportOptions {
    std::string out_dir;         // reports (and images) land here
    bool emit_images = false;    // per-scene S0 / AoP-DoP / error maps
    const CpfaPattern* pattern = nullptr;  // defaults to the standard pattern
};

// Runs every method over (id, truth-cube) pairs, writes report.csv and
// report.json (and qualitative PNGs when asked), and returns the records.
struct EvalScene {
    std::string id;
    Image<double> truth;
};

std::vector<MethodEvalResult> compare_methods(const std::vector<MethodSpec>& methods,
                                              const std::vector<EvalScene>& scenes,
                                              const ReportOptions& opts);

// Serialization helpers (also used by the CLI): CPSNR of an exact match is
// written as "inf" in CSV and null + "..._infinite": true in JSON.
std::string metrics_to_csv(const std::vector<MethodEvalResult>& results);
std::string metrics_to_json(const std::vector<MethodEvalResult>& results);

// Qualitative views of a cube: S0/2 as RGB, per-pixel |S0 error| (mean over
// colors), and the green-channel AoP-DoP false-color image.
Image<double> s0_view(const Image<double>& cube);
Image<double> aop_dop_view(const Image<double>& cube);
Image<double> s0_error_view(const Image<double>& cube, const Image<double>& truth);

}  // namespace tcpd
