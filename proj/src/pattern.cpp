#include "tcpd/pattern.hpp"

#include <json.hpp>

namespace tcpd {

namespace {

Orientation orientation_from_degrees(int deg) {
    switch (deg) {
        case 0: return Orientation::Deg0;
        case 45: return Orientation::Deg45;
        case 90: return Orientation::Deg90;
        case 135: return Orientation::Deg135;
    }
    throw InvalidInput("pattern: bad orientation angle " + std::to_string(deg));
}

ColorChannel color_from_string(const std::string& s) {
    if (s == "R") return ColorChannel::R;
    if (s == "G") return ColorChannel::G;
    if (s == "B") return ColorChannel::B;
    throw InvalidInput("pattern: bad color \"" + s + "\"");
}

}  // namespace

CpfaPattern CpfaPattern::standard() {
    return CpfaPattern(
        {{{Orientation::Deg90, Orientation::Deg45},
          {Orientation::Deg135, Orientation::Deg0}}},
        {{{ColorChannel::R, ColorChannel::G},
          {ColorChannel::G, ColorChannel::B}}});
}

CpfaPattern::CpfaPattern(const std::array<std::array<Orientation, 2>, 2>& orientations,
                         const std::array<std::array<ColorChannel, 2>, 2>& bayer)
    : orientations_(orientations), bayer_(bayer) {
    validate_and_index();
}

void CpfaPattern::validate_and_index() {
    std::array<int, kOrientations> seen{};
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
            int o = static_cast<int>(orientations_[dy][dx]);
            if (o < 0 || o >= kOrientations)
                throw InvalidInput("pattern: bad orientation value");
            seen[o]++;
            offsets_[o] = {dy, dx};
        }
    for (int o = 0; o < kOrientations; ++o)
        if (seen[o] != 1)
            throw InvalidInput("pattern: each 2x2 block must contain every orientation once");

    int counts[kColors] = {0, 0, 0};
    for (int by = 0; by < 2; ++by)
        for (int bx = 0; bx < 2; ++bx) counts[static_cast<int>(bayer_[by][bx])]++;
    if (counts[0] != 1 || counts[1] != 2 || counts[2] != 1)
        throw InvalidInput("pattern: block colors must be a Bayer arrangement (1R, 2G, 1B)");
    if (bayer_[0][0] == bayer_[0][1] || bayer_[0][0] == bayer_[1][0])
        throw InvalidInput("pattern: the two G blocks must be diagonal");
}

std::string CpfaPattern::to_json() const {
    nlohmann::json j;
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
            j["orientations"][dy][dx] =
                static_cast<int>(orientation_degrees(orientations_[dy][dx]));
    for (int by = 0; by < 2; ++by)
        for (int bx = 0; bx < 2; ++bx)
            j["bayer"][by][bx] = color_name(bayer_[by][bx]);
    return j.dump(2);
}

CpfaPattern CpfaPattern::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("pattern: invalid JSON: ") + e.what());
    }
    std::array<std::array<Orientation, 2>, 2> orientations;
    std::array<std::array<ColorChannel, 2>, 2> bayer;
    try {
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx)
                orientations[dy][dx] =
                    orientation_from_degrees(j.at("orientations").at(dy).at(dx).get<int>());
        for (int by = 0; by < 2; ++by)
            for (int bx = 0; bx < 2; ++bx)
                bayer[by][bx] = color_from_string(j.at("bayer").at(by).at(bx).get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("pattern: missing or malformed field: ") + e.what());
    }
    return CpfaPattern(orientations, bayer);
}

}  // namespace tcpd
