#pragma once

#include <cstdint>
#include <vector>

#include "docprep/raster.hpp"

namespace docprep {

struct RgbPixel {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const RgbPixel&, const RgbPixel&) = default;
};

/// Hue in degrees [0, 360); saturation and value in [0, 1].
struct HsvPixel {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;
};

/// Hue formula for the forward conversion.
///  hexcone : sector form from max/min, the exact inverse of hsv_to_rgb.
///  arccos  : the geometric arccos form
///            H = acos((R - G/2 - B/2) / sqrt(R^2+G^2+B^2-RG-RB-GB)), 360-H when B > G.
enum class HueFormula { hexcone, arccos };

/// standard: Rec. 601 weights. paper_literal: blue weight 0.144, so white maps to 262.65.
enum class LumaMode { standard, paper_literal };

struct LumaCoefficients {
    double wr = 0.299;
    double wg = 0.587;
    double wb = 0.114;

    static LumaCoefficients for_mode(LumaMode mode);
};

/// Separate H, S, V planes of an RGB image, row-major.
struct HsvPlanes {
    int width = 0;
    int height = 0;
    std::vector<double> h;
    std::vector<double> s;
    std::vector<double> v;
};

HsvPixel rgb_to_hsv(RgbPixel p, HueFormula formula = HueFormula::hexcone);
RgbPixel hsv_to_rgb(HsvPixel p);

double luma(RgbPixel p, const LumaCoefficients& coeffs);

/// Mean luma of an 8-bit RGB image divided by 255.
double mean_luma_brightness(const RasterImage& image, const LumaCoefficients& coeffs);

/// 0.3R + 0.59G + 0.11B, rounded half up. Evaluated in integer hundredths so
/// the rounding is exact.
RasterImage to_grayscale_luminance(const RasterImage& image);

HsvPlanes to_hsv_planes(const RasterImage& image, HueFormula formula = HueFormula::hexcone);
RasterImage from_hsv_planes(const HsvPlanes& planes);

inline RgbPixel pixel_at(const RasterImage& image, int row, int col)
{
    return {static_cast<std::uint8_t>(image.at(row, col, 0)), static_cast<std::uint8_t>(image.at(row, col, 1)),
            static_cast<std::uint8_t>(image.at(row, col, 2))};
}

} // namespace docprep
