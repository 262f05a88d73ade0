#include "tcpd/synthetic.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tcpd/dataset.hpp"
#include "tcpd/rng.hpp"

namespace tcpd {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct SmoothField {
    // sum of a few random cosine waves, roughly in [-1, 1]
    double a[3], fx[3], fy[3], ph[3];

    static SmoothField sample(Rng& rng, double max_freq) {
        SmoothField f;
        double norm = 0.0;
        for (int i = 0; i < 3; ++i) {
            f.a[i] = rng.uniform(0.3, 1.0);
            norm += f.a[i];
            const double freq = rng.uniform(0.2, 1.0) * max_freq;
            const double ang = rng.uniform(0.0, 2.0 * kPi);
            f.fx[i] = freq * std::cos(ang);
            f.fy[i] = freq * std::sin(ang);
            f.ph[i] = rng.uniform(0.0, 2.0 * kPi);
        }
        for (int i = 0; i < 3; ++i) f.a[i] /= norm;
        return f;
    }

    double operator()(double y, double x) const {
        double v = 0.0;
        for (int i = 0; i < 3; ++i)
            v += a[i] * std::cos(2.0 * kPi * (fx[i] * x + fy[i] * y) + ph[i]);
        return v;
    }
};

struct Shape {
    bool ellipse;
    double cy, cx, ry, rx, rot;
    double albedo[3];
    double aop, dop;       // radians, [0,1]
    bool grating;          // intensity grating inside the shape
    bool aop_ramp;         // AoP sweeps across the shape
    double gfreq, gang;    // grating frequency (cycles/px) and direction

    bool contains(double y, double x) const {
        const double dy = y - cy, dx = x - cx;
        const double c = std::cos(rot), s = std::sin(rot);
        const double u = (c * dx + s * dy) / rx;
        const double v = (-s * dx + c * dy) / ry;
        return ellipse ? (u * u + v * v <= 1.0) : (std::fabs(u) <= 1.0 && std::fabs(v) <= 1.0);
    }
};

}  // namespace

Image<double> synthesize_scene(uint64_t seed, int height, int width) {
    if (height % 4 != 0 || width % 4 != 0 || height < 16 || width < 16)
        throw InvalidInput("synthesize_scene: dimensions must be multiples of 4 and >= 16");
    Rng rng(seed);

    SmoothField bg_r = SmoothField::sample(rng, 3.0 / width);
    SmoothField bg_g = SmoothField::sample(rng, 3.0 / width);
    SmoothField bg_b = SmoothField::sample(rng, 3.0 / width);
    SmoothField bg_aop = SmoothField::sample(rng, 2.0 / width);
    SmoothField bg_dop = SmoothField::sample(rng, 2.0 / width);

    const int n_shapes = 8 + static_cast<int>(rng.uniform_below(7));
    std::vector<Shape> shapes(n_shapes);
    for (Shape& s : shapes) {
        s.ellipse = rng.uniform01() < 0.5;
        s.cy = rng.uniform(0.1, 0.9) * height;
        s.cx = rng.uniform(0.1, 0.9) * width;
        s.ry = rng.uniform(0.04, 0.22) * height;
        s.rx = rng.uniform(0.04, 0.22) * width;
        s.rot = rng.uniform(0.0, kPi);
        for (double& a : s.albedo) a = rng.uniform(0.08, 0.95);
        s.aop = rng.uniform(0.0, kPi);
        s.dop = rng.uniform(0.25, 0.95);
        s.grating = rng.uniform01() < 0.35;
        s.aop_ramp = !s.grating && rng.uniform01() < 0.25;
        s.gfreq = rng.uniform(0.12, 0.45);
        s.gang = rng.uniform(0.0, kPi);
    }

    Image<double> cube(kCubeChannels, height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double albedo[3] = {
                0.45 + 0.32 * bg_r(y, x),
                0.45 + 0.32 * bg_g(y, x),
                0.45 + 0.32 * bg_b(y, x),
            };
            double aop = kPi * (0.5 + 0.5 * bg_aop(y, x));
            double dop = 0.35 + 0.25 * bg_dop(y, x);
            for (const Shape& s : shapes) {
                if (!s.contains(y, x)) continue;
                for (int c = 0; c < 3; ++c) albedo[c] = s.albedo[c];
                aop = s.aop;
                dop = s.dop;
                const double u = std::cos(s.gang) * x + std::sin(s.gang) * y;
                if (s.grating) {
                    const double mod = 1.0 + 0.4 * std::cos(2.0 * kPi * s.gfreq * u);
                    for (int c = 0; c < 3; ++c) albedo[c] *= 0.7 * mod;
                }
                if (s.aop_ramp) aop = kPi * (0.08 * u - std::floor(0.08 * u));
            }
            for (int c = 0; c < 3; ++c)
                albedo[c] = std::min(0.98, std::max(0.02, albedo[c]));
            dop = std::min(0.98, std::max(0.05, dop));
            for (Orientation o : kAllOrientations) {
                const double theta = orientation_degrees(o) * kPi / 180.0;
                const double pol = 1.0 + dop * std::cos(2.0 * theta - 2.0 * aop);
                for (ColorChannel c : kAllColors) {
                    double v = 0.5 * albedo[static_cast<int>(c)] * pol;
                    v = std::min(1.0, std::max(0.0, v));
                    // snap to the 16-bit grid the PNG round trip would impose
                    v = std::round(v * 65535.0) / 65535.0;
                    cube.at(cube_channel(o, c), y, x) = v;
                }
            }
        }
    }
    return cube;
}

void generate_synthetic_dataset(const std::string& root, int n_scenes, int height, int width,
                                uint64_t seed) {
    if (n_scenes < 1) throw InvalidInput("generate_synthetic_dataset: need at least one scene");
    namespace fs = std::filesystem;
    fs::create_directories(root);
    nlohmann::json splits;
    splits["train"] = nlohmann::json::array();
    splits["val"] = nlohmann::json::array();
    splits["test"] = nlohmann::json::array();
    const int n_test = std::max(1, n_scenes / 5);
    const int n_val = n_scenes > n_test + 2 ? 2 : 0;
    for (int i = 0; i < n_scenes; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene%03d", i);
        Image<double> cube = synthesize_scene(Rng::derive(seed, i).next_u64(), height, width);
        save_scene_cube((fs::path(root) / name).string(), cube);
        if (i >= n_scenes - n_test)
            splits["test"].push_back(name);
        else if (i >= n_scenes - n_test - n_val)
            splits["val"].push_back(name);
        else
            splits["train"].push_back(name);
    }
    std::ofstream os(fs::path(root) / "splits.json");
    if (!os) throw IoError("cannot write splits.json under " + root);
    os << splits.dump(2) << "\n";
}

}  // namespace tcpd
