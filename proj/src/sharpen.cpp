#include "docprep/sharpen.hpp"

#include <algorithm>
#include <cmath>

namespace docprep {

void UnsharpConfig::validate() const
{
    if (!(amount >= 0.0))
        throw Error("unsharp: amount must be nonnegative");
    if (!(radius > 0.0))
        throw Error("unsharp: radius must be positive");
    if (threshold < 0)
        throw Error("unsharp: threshold must be nonnegative");
    if (kernel_size < 3 || kernel_size % 2 == 0)
        throw Error("unsharp: kernel_size must be odd and at least 3");
}

int UnsharpConfig::effective_kernel_size() const
{
    if (radius <= 1.0)
        return kernel_size;
    return std::max(kernel_size, 2 * static_cast<int>(std::ceil(3.0 * radius)) + 1);
}

Kernel gaussian_kernel(double radius, int size)
{
    if (!(radius > 0.0))
        throw Error("gaussian_kernel: radius must be positive");
    if (size < 1 || size % 2 == 0)
        throw Error("gaussian_kernel: size must be odd");
    Kernel k;
    k.size = size;
    k.weights.resize(static_cast<std::size_t>(size) * size);
    const int half = size / 2;
    const double denom = 2.0 * radius * radius;
    double sum = 0.0;
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const double di = i - half, dj = j - half;
            const double w = std::exp(-(di * di + dj * dj) / denom);
            k.weights[static_cast<std::size_t>(i) * size + j] = w;
            sum += w;
        }
    for (auto& w : k.weights)
        w /= sum;
    return k;
}

RasterImage convolve(const RasterImage& plane, const Kernel& kernel)
{
    if (plane.channels() != 1)
        throw Error("convolve: plane must be single-channel");
    if (plane.empty())
        throw Error("convolve: empty plane");
    if (kernel.size > plane.width() || kernel.size > plane.height())
        throw Error("convolve: kernel larger than image");

    const int half = kernel.size / 2;
    const int w = plane.width(), h = plane.height();
    const double top = plane.max_value();
    RasterImage out(w, h, 1, plane.depth());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < kernel.size; ++i) {
                const int yy = std::clamp(y + i - half, 0, h - 1);
                for (int j = 0; j < kernel.size; ++j) {
                    const int xx = std::clamp(x + j - half, 0, w - 1);
                    acc += kernel.at(i, j) * plane.at(yy, xx);
                }
            }
            out.at(y, x) = static_cast<std::uint16_t>(std::clamp(std::floor(acc + 0.5), 0.0, top));
        }
    return out;
}

std::vector<int> unsharp_mask_raw(const RasterImage& plane, const UnsharpConfig& cfg)
{
    cfg.validate();
    const auto blurred = convolve(plane, gaussian_kernel(cfg.radius, cfg.effective_kernel_size()));
    std::vector<int> mask(plane.pixel_count());
    auto src = plane.data();
    auto blur = blurred.data();
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = static_cast<int>(src[i]) - static_cast<int>(blur[i]);
    return mask;
}

RasterImage unsharp_mask(const RasterImage& plane, const UnsharpConfig& cfg)
{
    const auto mask = unsharp_mask_raw(plane, cfg);
    // threshold is expressed in 8-bit units
    const int threshold = plane.depth() == 16 ? cfg.threshold * 257 : cfg.threshold;
    const double top = plane.max_value();
    RasterImage out = plane;
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (std::abs(mask[i]) <= threshold)
            continue;
        const double v = dst[i] + cfg.amount * mask[i];
        dst[i] = static_cast<std::uint16_t>(std::clamp(std::floor(v + 0.5), 0.0, top));
    }
    return out;
}

double halo_metric(const RasterImage& before, const RasterImage& after)
{
    if (before.width() != after.width() || before.height() != after.height() ||
        before.channels() != after.channels() || before.depth() != after.depth())
        throw Error("halo_metric: image dimensions differ");
    if (before.empty())
        return 0.0;
    const auto top = before.max_value();
    auto b = before.data();
    auto a = after.data();
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if ((a[i] == 0 && b[i] != 0) || (a[i] == top && b[i] != top))
            ++clipped;
    return static_cast<double>(clipped) / static_cast<double>(a.size());
}

} // namespace docprep
