#pragma once

#include <array>
#include <string>
#include <utility>

#include "tcpd/common.hpp"

namespace tcpd {

// 4x4-periodic CPFA layout. Each 2x2 block of pixels carries the four
// polarizer orientations; blocks themselves are colored by a 2x2 Bayer
// arrangement (one R, two diagonal G, one B), so one full period is 4x4.
class CpfaPattern {
public:
    // Sony-style default: orientations [[90,45],[135,0]] inside each block,
    // blocks colored RGGB with R at block (0,0).
    static CpfaPattern standard();

    CpfaPattern() = default;
    CpfaPattern(const std::array<std::array<Orientation, 2>, 2>& orientations,
                const std::array<std::array<ColorChannel, 2>, 2>& bayer);

    Orientation orientation_at(int y, int x) const {
        return orientations_[y & 1][x & 1];
    }
    // Color is constant over each 2x2 block.
    ColorChannel color_at(int y, int x) const {
        return bayer_[(y >> 1) & 1][(x >> 1) & 1];
    }
    // Bayer color seen by the half-resolution grid after orientation
    // subsampling (block (by,bx) maps to half-res pixel (by,bx)).
    ColorChannel bayer_color(int by, int bx) const {
        return bayer_[by & 1][bx & 1];
    }
    // (dy,dx) position of orientation o inside every 2x2 block.
    std::pair<int, int> orientation_offset(Orientation o) const {
        return offsets_[static_cast<int>(o)];
    }

    bool operator==(const CpfaPattern& o) const {
        return orientations_ == o.orientations_ && bayer_ == o.bayer_;
    }

    std::string to_json() const;
    static CpfaPattern from_json(const std::string& text);

private:
    void validate_and_index();

    std::array<std::array<Orientation, 2>, 2> orientations_{};
    std::array<std::array<ColorChannel, 2>, 2> bayer_{};
    std::array<std::pair<int, int>, kOrientations> offsets_{};
};

}  // namespace tcpd
