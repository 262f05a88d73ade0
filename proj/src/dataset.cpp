#include "tcpd/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "tcpd/png_io.hpp"

namespace fs = std::filesystem;

namespace tcpd {

const char* const kOrientationFileNames[kOrientations] = {"i000.png", "i045.png", "i090.png",
                                                          "i135.png"};

Image<double> load_scene_cube(const std::string& scene_dir) {
    Image<double> cube;
    for (Orientation o : kAllOrientations) {
        const std::string path =
            (fs::path(scene_dir) / kOrientationFileNames[static_cast<int>(o)]).string();
        if (!fs::exists(path)) throw IoError("scene file missing: " + path);
        Image<double> rgb = read_png(path);
        if (rgb.channels() != 3) throw IoError(path + ": expected an RGB image");
        if (cube.empty()) {
            if (rgb.height() % 4 != 0 || rgb.width() % 4 != 0)
                throw IoError(path + ": scene dimensions must be multiples of 4");
            cube = Image<double>(kCubeChannels, rgb.height(), rgb.width());
        } else if (rgb.height() != cube.height() || rgb.width() != cube.width()) {
            throw IoError(path + ": orientation images disagree on size");
        }
        for (ColorChannel c : kAllColors) {
            const double* src = rgb.plane(static_cast<int>(c));
            std::copy(src, src + rgb.plane_size(), cube.plane(cube_channel(o, c)));
        }
    }
    return cube;
}

void save_scene_cube(const std::string& scene_dir, const Image<double>& cube) {
    if (cube.channels() != kCubeChannels)
        throw InvalidInput("save_scene_cube: expected 12-channel cube");
    fs::create_directories(scene_dir);
    for (Orientation o : kAllOrientations) {
        Image<double> rgb(3, cube.height(), cube.width());
        for (ColorChannel c : kAllColors) {
            const double* src = cube.plane(cube_channel(o, c));
            std::copy(src, src + cube.plane_size(), rgb.plane(static_cast<int>(c)));
        }
        write_png((fs::path(scene_dir) / kOrientationFileNames[static_cast<int>(o)]).string(),
                  rgb);
    }
}

std::vector<std::string> list_scene_dirs(const std::string& root) {
    if (!fs::is_directory(root)) throw IoError("dataset root is not a directory: " + root);
    std::vector<std::string> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        if (fs::exists(entry.path() / kOrientationFileNames[0]))
            dirs.push_back(entry.path().filename().string());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

std::vector<SceneRecord> load_dataset(const std::string& root) {
    const std::vector<std::string> ids = list_scene_dirs(root);
    if (ids.empty()) throw IoError("no scenes found under " + root);

    std::vector<std::string> split_of(ids.size());
    const fs::path splits_path = fs::path(root) / "splits.json";
    if (fs::exists(splits_path)) {
        std::ifstream is(splits_path);
        nlohmann::json j;
        try {
            is >> j;
        } catch (const nlohmann::json::exception& e) {
            throw IoError(splits_path.string() + ": " + e.what());
        }
        for (size_t i = 0; i < ids.size(); ++i) {
            std::string assigned;
            for (const char* split : {"train", "val", "test"}) {
                if (!j.contains(split)) continue;
                for (const auto& v : j[split])
                    if (v.get<std::string>() == ids[i]) {
                        if (!assigned.empty())
                            throw ConfigError("scene " + ids[i] + " appears in two splits");
                        assigned = split;
                    }
            }
            if (assigned.empty())
                throw ConfigError("scene " + ids[i] + " missing from " + splits_path.string());
            split_of[i] = assigned;
        }
    } else {
        const size_t n = ids.size();
        const size_t n_test = std::max<size_t>(1, n / 5);
        const size_t n_val = n > n_test + 2 ? 2 : 0;
        for (size_t i = 0; i < n; ++i) {
            if (i >= n - n_test)
                split_of[i] = "test";
            else if (i >= n - n_test - n_val)
                split_of[i] = "val";
            else
                split_of[i] = "train";
        }
    }

    std::vector<SceneRecord> scenes;
    scenes.reserve(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
        Image<double> cube = load_scene_cube((fs::path(root) / ids[i]).string());
        scenes.push_back({ids[i], cube.cast<float>(), split_of[i]});
    }
    return scenes;
}

void save_raw(const CpfaRaw<double>& raw, const std::string& png_path,
              const std::string& sidecar_path) {
    write_png(png_path, raw.data);
    std::ofstream os(sidecar_path);
    if (!os) throw IoError("cannot create " + sidecar_path);
    nlohmann::json j;
    j["format"] = "cpfa-raw";
    j["height"] = raw.data.height();
    j["width"] = raw.data.width();
    j["pattern"] = nlohmann::json::parse(raw.pattern.to_json());
    os << j.dump(2) << "\n";
    if (!os) throw IoError("failed writing " + sidecar_path);
}

CpfaRaw<double> load_raw(const std::string& png_path, const std::string& sidecar_path) {
    Image<double> img = read_png(png_path);
    if (img.channels() != 1) throw IoError(png_path + ": raw must be single-channel");
    std::ifstream is(sidecar_path);
    if (!is) throw IoError("cannot open " + sidecar_path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(sidecar_path + ": " + e.what());
    }
    if (j.value("format", "") != "cpfa-raw")
        throw IoError(sidecar_path + ": not a cpfa-raw sidecar");
    if (j.value("height", -1) != img.height() || j.value("width", -1) != img.width())
        throw IoError(sidecar_path + ": sidecar dimensions disagree with " + png_path);
    return CpfaRaw<double>{std::move(img), CpfaPattern::from_json(j.at("pattern").dump())};
}

}  // namespace tcpd
