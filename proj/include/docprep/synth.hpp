#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "docprep/colorspace.hpp"
#include "docprep/raster.hpp"

namespace docprep {

/// Synthetic degraded page: dark 5x7 bitmap text on a light ground, then a
/// multiplicative linear illumination falloff, Gaussian blur and additive
/// Gaussian noise, in that order.
struct SynthDocSpec {
    int width = 480;
    int height = 320;
    std::vector<std::string> lines; // empty: pseudo-words drawn from the seed
    int stroke = 2;                 // pixels per font dot
    int margin = 12;
    int line_gap = 6;               // extra pixels between text rows
    RgbPixel paper{232, 228, 220};
    RgbPixel ink{40, 38, 52};
    double gradient_strength = 0.0; // illumination falls from 1 to 1 - strength
    double gradient_angle = 0.0;    // degrees, 0 = falloff left to right
    double noise_sigma = 0.0;
    double blur_radius = 0.0;

    void validate() const;
    int columns() const;   // characters per line that fit
    int max_lines() const; // text rows that fit
};

struct SynthDocument {
    RasterImage image;      // 8-bit RGB
    BinaryImage truth_mask; // 1 = paper, 0 = ink, same polarity as binarize output
    std::string truth_text; // lines joined by '\n'
};

SynthDocument synth_document(const SynthDocSpec& spec, std::uint64_t seed);

/// Flat `key = value` document; keys mirror the struct fields, colours as
/// `r,g,b`, and `line` may repeat once per text row.
SynthDocSpec load_synth_spec(std::string_view text);

/// Column bitmaps for printable ASCII, bit 0 the top row. Unknown characters
/// render as '?'.
const std::uint8_t* glyph_columns(char c);

} // namespace docprep
