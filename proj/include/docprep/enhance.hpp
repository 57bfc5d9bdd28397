#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "docprep/colorspace.hpp"
#include "docprep/raster.hpp"

namespace docprep {

/// CLAHE parameters. The per-tile count limit is
///   beta = (M / N) * (1 + clip_factor / 100 * (slope_max - 1))
/// with M the tile pixel count and N the bin count; clip_factor = 100 gives
/// the maximum limit, slope_max times the uniform bin height.
struct ClaheConfig {
    int tiles_x = 8;
    int tiles_y = 8;
    double clip_factor = 100.0;
    double slope_max = 4.0;
    int gray_levels = 256;
    std::optional<double> clip_limit_override; // absolute count limit, bypasses the formula
    std::optional<std::uint32_t> display_min;  // defaults to 0
    std::optional<std::uint32_t> display_max;  // defaults to the plane's max level

    void validate() const;
};

struct HistogramMapping {
    std::vector<std::uint32_t> lut;
    std::uint32_t display_min = 0;
    std::uint32_t display_max = 0;
    std::vector<double> cdf;
};

struct GainBias {
    double gain = 1.4;
    double bias = 50.0;
    double ceiling = 0.93;
    bool ceiling_unreachable = false;
};

double clip_limit(double region_size, int gray_levels, double clip_factor, double slope_max);
double clip_limit(const ClaheConfig& config, double region_size);

/// Clips every bin at `limit` and spreads the excess uniformly, at most eight
/// passes; whatever is still left goes in equal parts to the bins sitting at
/// the limit. Total mass is conserved.
std::vector<double> clip_histogram(const Histogram& h, double limit);

/// lut[f] = round((display_max - display_min) * P(f) + display_min), P the
/// CDF of the clipped histogram.
HistogramMapping clipped_mapping(const Histogram& h, double limit, std::uint32_t display_min,
                                 std::uint32_t display_max);

/// Tile-wise clipped equalization of a single-channel plane, stitched by
/// bilinear interpolation between tile-centre mappings.
RasterImage clahe_apply(const RasterImage& plane, const ClaheConfig& config);

/// Replaces V by its CLAHE-equalized version; H and S are copied unchanged.
/// working_depth 16 quantizes V to 16 bits for the equalization and brings it
/// back to 8 bits before reassembly.
HsvPlanes equalize_value_plane(const HsvPlanes& planes, const ClaheConfig& config, int working_depth = 16);

RasterImage equalize_brightness(const RasterImage& image, const ClaheConfig& config, int working_depth = 16,
                                HueFormula hue = HueFormula::hexcone);

/// g = gain * f + bias per sample, rounded half up and clamped to [0, 255].
RasterImage adjust_gain_bias(const RasterImage& image, const GainBias& gb);

/// Predicted mean brightness after the gain/bias transform, ignoring clamping.
double predicted_brightness(double brightness, double gain, double bias);

/// Walks (1.4, 50), (1.4, 45), ..., (1.4, 0), (1.3, 0), ..., (1.0, 0) and
/// returns the first pair whose predicted brightness is within the ceiling.
GainBias auto_gain_bias_for(double brightness, double ceiling);
GainBias auto_gain_bias(const RasterImage& image, double ceiling, const LumaCoefficients& coeffs);

} // namespace docprep
