#pragma once

#include <string>

#include "tcpd/image.hpp"

namespace tcpd {

// 16-bit PNG codecs. Values map linearly between [0,1] and [0,65535];
// writers clamp to [0,1] first. Readers also accept 8-bit files
// (normalized by 255). Images are 1-channel (gray) or 3-channel (RGB).
Image<double> read_png(const std::string& path);
void write_png(const std::string& path, const Image<double>& img);

}  // namespace tcpd
