#include "docprep/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace docprep {

namespace {

std::uint8_t round_to_byte(double x)
{
    return static_cast<std::uint8_t>(std::clamp(std::floor(x + 0.5), 0.0, 255.0));
}

double hexcone_hue(double r, double g, double b, double hi, double lo)
{
    const double chroma = hi - lo;
    double h = 0.0;
    if (hi == r)
        h = 60.0 * ((g - b) / chroma);
    else if (hi == g)
        h = 60.0 * ((b - r) / chroma + 2.0);
    else
        h = 60.0 * ((r - g) / chroma + 4.0);
    if (h < 0.0)
        h += 360.0;
    return h;
}

double arccos_hue(double r, double g, double b)
{
    const double denom = std::sqrt(r * r + g * g + b * b - r * g - r * b - g * b);
    const double cosine = std::clamp((r - 0.5 * g - 0.5 * b) / denom, -1.0, 1.0);
    const double angle = std::acos(cosine) * 180.0 / std::numbers::pi;
    return b > g ? 360.0 - angle : angle;
}

} // namespace

LumaCoefficients LumaCoefficients::for_mode(LumaMode mode)
{
    if (mode == LumaMode::paper_literal)
        return {0.299, 0.587, 0.144};
    return {0.299, 0.587, 0.114};
}

HsvPixel rgb_to_hsv(RgbPixel p, HueFormula formula)
{
    const double r = p.r, g = p.g, b = p.b;
    const double hi = std::max({r, g, b});
    const double lo = std::min({r, g, b});

    HsvPixel out;
    out.v = hi / 255.0;
    out.s = hi > 0.0 ? 1.0 - lo / hi : 0.0;
    if (hi == lo)
        return out; // neutral: hue 0, saturation 0

    out.h = formula == HueFormula::arccos ? arccos_hue(r, g, b) : hexcone_hue(r, g, b, hi, lo);
    if (out.h >= 360.0)
        out.h -= 360.0;
    return out;
}

RgbPixel hsv_to_rgb(HsvPixel p)
{
    const double hi = 255.0 * p.v;
    const double lo = hi * (1.0 - p.s);
    const double sector_pos = p.h / 60.0;
    const double z = (hi - lo) * (1.0 - std::abs(std::fmod(sector_pos, 2.0) - 1.0));
    const int sector = std::clamp(static_cast<int>(std::floor(sector_pos)), 0, 5);

    double r = 0, g = 0, b = 0;
    switch (sector) {
    case 0: r = hi; g = z + lo; b = lo; break;
    case 1: r = z + lo; g = hi; b = lo; break;
    case 2: r = lo; g = hi; b = z + lo; break;
    case 3: r = lo; g = z + lo; b = hi; break;
    case 4: r = z + lo; g = lo; b = hi; break;
    default: r = hi; g = lo; b = z + lo; break;
    }
    return {round_to_byte(r), round_to_byte(g), round_to_byte(b)};
}

double luma(RgbPixel p, const LumaCoefficients& coeffs)
{
    return coeffs.wr * p.r + coeffs.wg * p.g + coeffs.wb * p.b;
}

double mean_luma_brightness(const RasterImage& image, const LumaCoefficients& coeffs)
{
    if (image.empty())
        throw Error("mean_luma_brightness: empty image");
    if (image.channels() != 3 || image.depth() != 8)
        throw Error("mean_luma_brightness: expected 8-bit RGB image");
    // Channel sums are exact in integers; the weighted mean follows by linearity.
    std::uint64_t sums[3] = {0, 0, 0};
    auto data = image.data();
    for (std::size_t i = 0; i < data.size(); i += 3) {
        sums[0] += data[i];
        sums[1] += data[i + 1];
        sums[2] += data[i + 2];
    }
    const double n = static_cast<double>(image.pixel_count());
    const double mean = (coeffs.wr * sums[0] + coeffs.wg * sums[1] + coeffs.wb * sums[2]) / n;
    return mean / 255.0;
}

RasterImage to_grayscale_luminance(const RasterImage& image)
{
    if (image.channels() != 3)
        throw Error("to_grayscale_luminance: expected 3-channel image");
    RasterImage out(image.width(), image.height(), 1, image.depth());
    auto src = image.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const std::uint64_t weighted = 30u * src[3 * i] + 59u * src[3 * i + 1] + 11u * src[3 * i + 2];
        dst[i] = static_cast<std::uint16_t>((weighted + 50u) / 100u);
    }
    return out;
}

HsvPlanes to_hsv_planes(const RasterImage& image, HueFormula formula)
{
    if (image.channels() != 3 || image.depth() != 8)
        throw Error("to_hsv_planes: expected 8-bit RGB image");
    HsvPlanes planes;
    planes.width = image.width();
    planes.height = image.height();
    const std::size_t n = image.pixel_count();
    planes.h.resize(n);
    planes.s.resize(n);
    planes.v.resize(n);
    auto data = image.data();
    for (std::size_t i = 0; i < n; ++i) {
        RgbPixel p{static_cast<std::uint8_t>(data[3 * i]), static_cast<std::uint8_t>(data[3 * i + 1]),
                   static_cast<std::uint8_t>(data[3 * i + 2])};
        auto hsv = rgb_to_hsv(p, formula);
        planes.h[i] = hsv.h;
        planes.s[i] = hsv.s;
        planes.v[i] = hsv.v;
    }
    return planes;
}

RasterImage from_hsv_planes(const HsvPlanes& planes)
{
    const std::size_t n = static_cast<std::size_t>(planes.width) * planes.height;
    if (planes.h.size() != n || planes.s.size() != n || planes.v.size() != n)
        throw Error("from_hsv_planes: plane sizes do not match dimensions");
    RasterImage out(planes.width, planes.height, 3, 8);
    auto data = out.data();
    for (std::size_t i = 0; i < n; ++i) {
        auto p = hsv_to_rgb({planes.h[i], planes.s[i], planes.v[i]});
        data[3 * i] = p.r;
        data[3 * i + 1] = p.g;
        data[3 * i + 2] = p.b;
    }
    return out;
}

} // namespace docprep
