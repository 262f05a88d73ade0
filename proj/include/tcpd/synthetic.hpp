#pragma once

#include <string>

#include "tcpd/image.hpp"

namespace tcpd {

// Procedural ground-truth generator for polarization scenes. Each scene is
// a smooth colored background overlaid with rotated rectangles/ellipses
// carrying their own albedo and polarization state, plus high-frequency
// gratings that stress demosaicking. Emitted intensities follow
// I_theta = albedo/2 * (1 + dop * cos(2 theta - 2 aop)) per channel and are
// quantized to the 16-bit grid so in-memory scenes match their PNG form.
Image<double> synthesize_scene(uint64_t seed, int height, int width);

// Writes n_scenes scene directories (scene000, ...) plus splits.json giving
// a train/val/test split with 2 validation scenes and ~n/5 test scenes.
void generate_synthetic_dataset(const std::string& root, int n_scenes, int height, int width,
                                uint64_t seed);

}  // namespace tcpd
