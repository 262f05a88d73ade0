#pragma once

#include <string>
#include <vector>

#include "tcpd/mosaic.hpp"

namespace tcpd {

// On-disk scene format: one directory per scene holding four 16-bit RGB
// PNGs named i000.png, i045.png, i090.png, i135.png (one per polarizer
// orientation). A dataset root contains scene directories plus an optional
// splits.json {"train": [...], "val": [...], "test": [...]}.
struct SceneRecord {
    std::string id;
    Image<float> cube;  // 12 channels in [0,1]
    std::string split;  // "train" | "val" | "test"
};

extern const char* const kOrientationFileNames[kOrientations];  // i000.png ...

Image<double> load_scene_cube(const std::string& scene_dir);
void save_scene_cube(const std::string& scene_dir, const Image<double>& cube);

// Loads every scene under root. Splits come from splits.json when present;
// otherwise scenes are ordered by name and assigned test = max(1, N/5)
// from the back, then 2 validation scenes, remainder train (a 40-scene
// root yields the 30/2/8 default).
std::vector<SceneRecord> load_dataset(const std::string& root);

std::vector<std::string> list_scene_dirs(const std::string& root);

// Raw persistence: 16-bit grayscale PNG plus a JSON sidecar carrying the
// pattern descriptor.
void save_raw(const CpfaRaw<double>& raw, const std::string& png_path,
              const std::string& sidecar_path);
CpfaRaw<double> load_raw(const std::string& png_path, const std::string& sidecar_path);

}  // namespace tcpd
