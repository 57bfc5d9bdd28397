#pragma once

#include <cstdint>
#include <vector>

#include "docprep/raster.hpp"

namespace docprep {

struct UnsharpConfig {
    double amount = 1.5;
    double radius = 0.5;
    int threshold = 0;
    int kernel_size = 3;

    void validate() const;
    /// kernel_size for radius <= 1; wider radii get 2 * ceil(3 * radius) + 1
    /// so the Gaussian tail is not truncated.
    int effective_kernel_size() const;
};

/// Square, normalized convolution kernel stored row-major.
struct Kernel {
    int size = 0;
    std::vector<double> weights;

    double at(int row, int col) const { return weights[static_cast<std::size_t>(row) * size + col]; }
};

Kernel gaussian_kernel(double radius, int size);

/// Clamp-to-edge convolution; sums are accumulated in double in kernel
/// row-major order, rounded half up and clamped to the plane's range.
RasterImage convolve(const RasterImage& plane, const Kernel& kernel);

/// J = I + amount * (I - blur(I)) wherever |I - blur(I)| > threshold.
RasterImage unsharp_mask(const RasterImage& plane, const UnsharpConfig& cfg);

/// The bare mask I - blur(I), signed, one value per pixel.
std::vector<int> unsharp_mask_raw(const RasterImage& plane, const UnsharpConfig& cfg);

/// Fraction of pixels pinned at 0 or the maximum level in `after` that were
/// not at that level in `before`.
double halo_metric(const RasterImage& before, const RasterImage& after);

} // namespace docprep
