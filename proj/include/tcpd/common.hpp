#pragma once

#include <stdexcept>
#include <string>

namespace tcpd {

inline constexpr const char* kVersionString = "0.1.0";

// Error hierarchy. The C API and the CLI map these onto status/exit codes,
// so new failure modes should reuse one of the categories below.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed arguments or tensors (shape mismatch, bad enum, bad pattern).
struct InvalidInput : Error {
    using Error::Error;
};

// Filesystem and codec failures; message carries the offending path.
struct IoError : Error {
    using Error::Error;
};

// Non-finite values where the pipeline requires finite ones.
struct NumericError : Error {
    using Error::Error;
};

// Unusable configuration (missing fields, too few scenes, bad splits).
struct ConfigError : Error {
    using Error::Error;
};

// Polarizer orientations in canonical channel order.
enum class Orientation : int { Deg0 = 0, Deg45 = 1, Deg90 = 2, Deg135 = 3 };

enum class ColorChannel : int { R = 0, G = 1, B = 2 };

inline constexpr int kOrientations = 4;
inline constexpr int kColors = 3;
inline constexpr int kCubeChannels = kOrientations * kColors;

inline constexpr Orientation kAllOrientations[kOrientations] = {
    Orientation::Deg0, Orientation::Deg45, Orientation::Deg90, Orientation::Deg135};

inline constexpr ColorChannel kAllColors[kColors] = {
    ColorChannel::R, ColorChannel::G, ColorChannel::B};

// Channel index of (orientation, color) in a 12-channel cube:
// [I0_R, I0_G, I0_B, I45_R, ..., I135_B].
inline constexpr int cube_channel(Orientation o, ColorChannel c) {
    return static_cast<int>(o) * kColors + static_cast<int>(c);
}

inline constexpr double orientation_degrees(Orientation o) {
    return 45.0 * static_cast<int>(o);
}

inline const char* orientation_name(Orientation o) {
    switch (o) {
        case Orientation::Deg0: return "0";
        case Orientation::Deg45: return "45";
        case Orientation::Deg90: return "90";
        case Orientation::Deg135: return "135";
    }
    return "?";
}

inline const char* color_name(ColorChannel c) {
    switch (c) {
        case ColorChannel::R: return "R";
        case ColorChannel::G: return "G";
        case ColorChannel::B: return "B";
    }
    return "?";
}

// Whole-sample reflection of an out-of-range index into [0, n).
// reflect(-1) = 1, reflect(n) = n - 2. Requires n >= 2 for out-of-range i.
inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

}  // namespace tcpd
