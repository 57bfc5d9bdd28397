#include "docprep/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace docprep {

void ClaheConfig::validate() const
{
    if (tiles_x < 1 || tiles_y < 1)
        throw Error("clahe: tile counts must be at least 1");
    if (!(clip_factor >= 0.0 && clip_factor <= 100.0))
        throw Error("clahe: clip_factor must lie in [0, 100]");
    if (gray_levels < 2)
        throw Error("clahe: gray_levels must be at least 2");
    if (!(slope_max > 1.0))
        throw Error("clahe: slope_max must exceed 1");
    if (clip_limit_override && !(*clip_limit_override > 0.0))
        throw Error("clahe: clip_limit must be positive");
    if (display_min && display_max && *display_min > *display_max)
        throw Error("clahe: display_min exceeds display_max");
}

double clip_limit(double region_size, int gray_levels, double clip_factor, double slope_max)
{
    return region_size / gray_levels * (1.0 + clip_factor / 100.0 * (slope_max - 1.0));
}

double clip_limit(const ClaheConfig& config, double region_size)
{
    if (config.clip_limit_override)
        return *config.clip_limit_override;
    return clip_limit(region_size, config.gray_levels, config.clip_factor, config.slope_max);
}

std::vector<double> clip_histogram(const Histogram& h, double limit)
{
    constexpr int max_passes = 8;
    std::vector<double> bins(h.bins.begin(), h.bins.end());
    const double n = static_cast<double>(bins.size());

    double excess = 0.0;
    for (auto& b : bins) {
        if (b > limit) {
            excess += b - limit;
            b = limit;
        }
    }
    for (int pass = 0; pass < max_passes && excess >= 1.0; ++pass) {
        const double share = excess / n;
        excess = 0.0;
        for (auto& b : bins) {
            b += share;
            if (b > limit) {
                excess += b - limit;
                b = limit;
            }
        }
    }
    if (excess > 0.0) {
        const auto at_limit = std::count_if(bins.begin(), bins.end(), [&](double b) { return b >= limit; });
        if (at_limit == 0) {
            for (auto& b : bins)
                b += excess / n;
        } else {
            const double share = excess / static_cast<double>(at_limit);
            for (auto& b : bins)
                if (b >= limit)
                    b += share;
        }
    }
    return bins;
}

HistogramMapping clipped_mapping(const Histogram& h, double limit, std::uint32_t display_min,
                                 std::uint32_t display_max)
{
    if (h.total == 0 || h.bins.empty())
        throw Error("clipped_mapping: empty histogram");
    if (display_min > display_max)
        throw Error("clipped_mapping: display_min exceeds display_max");

    auto bins = clip_histogram(h, limit);
    const double mass = std::accumulate(bins.begin(), bins.end(), 0.0);
    const double span = static_cast<double>(display_max) - display_min;

    HistogramMapping map;
    map.display_min = display_min;
    map.display_max = display_max;
    map.cdf.resize(bins.size());
    map.lut.resize(bins.size());
    double running = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        running += bins[i];
        const double p = std::min(running / mass, 1.0);
        map.cdf[i] = p;
        map.lut[i] = static_cast<std::uint32_t>(std::floor(span * p + display_min + 0.5));
    }
    return map;
}

namespace {

struct Span {
    int lo = 0;
    int hi = 0; // exclusive
    double centre() const { return (lo + hi - 1) / 2.0; }
};

std::vector<Span> split(int length, int parts)
{
    std::vector<Span> spans(parts);
    for (int i = 0; i < parts; ++i)
        spans[i] = {static_cast<int>(static_cast<long long>(i) * length / parts),
                    static_cast<int>(static_cast<long long>(i + 1) * length / parts)};
    return spans;
}

// Interpolation nodes for one axis: lower tile, upper tile, weight on upper.
struct Blend {
    int lower = 0;
    int upper = 0;
    double weight = 0.0;
};

std::vector<Blend> blends(const std::vector<Span>& spans, int length)
{
    std::vector<Blend> out(length);
    const int last = static_cast<int>(spans.size()) - 1;
    int t = 0;
    for (int pos = 0; pos < length; ++pos) {
        if (pos <= spans.front().centre()) {
            out[pos] = {0, 0, 0.0};
            continue;
        }
        if (pos >= spans.back().centre()) {
            out[pos] = {last, last, 0.0};
            continue;
        }
        while (t + 1 < last && spans[t + 1].centre() <= pos)
            ++t;
        const double c0 = spans[t].centre();
        const double c1 = spans[t + 1].centre();
        out[pos] = {t, t + 1, (pos - c0) / (c1 - c0)};
    }
    return out;
}

} // namespace

RasterImage clahe_apply(const RasterImage& plane, const ClaheConfig& config)
{
    config.validate();
    if (plane.channels() != 1)
        throw Error("clahe_apply: plane must be single-channel");
    if (plane.width() < config.tiles_x || plane.height() < config.tiles_y)
        throw Error("clahe_apply: image smaller than one pixel per tile");

    const std::uint32_t lo = config.display_min.value_or(0);
    const std::uint32_t hi = config.display_max.value_or(plane.max_value());
    if (hi > plane.max_value() || lo > hi)
        throw Error("clahe_apply: display range outside plane depth");

    const auto rows = split(plane.height(), config.tiles_y);
    const auto cols = split(plane.width(), config.tiles_x);

    std::vector<HistogramMapping> maps;
    maps.reserve(rows.size() * cols.size());
    for (const auto& r : rows)
        for (const auto& c : cols) {
            Rect tile{r.lo, c.lo, r.hi - r.lo, c.hi - c.lo};
            auto h = histogram(plane, tile, config.gray_levels);
            const double limit = clip_limit(config, static_cast<double>(tile.height) * tile.width);
            maps.push_back(clipped_mapping(h, limit, lo, hi));
        }

    const auto row_blend = blends(rows, plane.height());
    const auto col_blend = blends(cols, plane.width());
    const std::uint64_t levels = std::uint64_t{1} << plane.depth();
    const std::uint64_t bins = static_cast<std::uint64_t>(config.gray_levels);
    const std::size_t tx = cols.size();

    RasterImage out(plane.width(), plane.height(), 1, plane.depth());
    for (int y = 0; y < plane.height(); ++y) {
        const auto& by = row_blend[y];
        for (int x = 0; x < plane.width(); ++x) {
            const auto& bx = col_blend[x];
            const std::size_t bin = static_cast<std::size_t>(plane.at(y, x) * bins / levels);
            const double v00 = maps[by.lower * tx + bx.lower].lut[bin];
            const double v01 = maps[by.lower * tx + bx.upper].lut[bin];
            const double v10 = maps[by.upper * tx + bx.lower].lut[bin];
            const double v11 = maps[by.upper * tx + bx.upper].lut[bin];
            const double top = v00 + bx.weight * (v01 - v00);
            const double bottom = v10 + bx.weight * (v11 - v10);
            const double v = top + by.weight * (bottom - top);
            out.at(y, x) = static_cast<std::uint16_t>(std::clamp(std::floor(v + 0.5), double(lo), double(hi)));
        }
    }
    return out;
}

HsvPlanes equalize_value_plane(const HsvPlanes& planes, const ClaheConfig& config, int working_depth)
{
    if (working_depth != 8 && working_depth != 16)
        throw Error("equalize: working depth must be 8 or 16");
    const double scale = working_depth == 16 ? 65535.0 : 255.0;

    RasterImage value(planes.width, planes.height, 1, working_depth);
    auto v = value.data();
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<std::uint16_t>(std::floor(planes.v[i] * scale + 0.5));

    auto equalized = convert_depth(clahe_apply(value, config), 8);

    HsvPlanes out = planes;
    auto e = equalized.data();
    for (std::size_t i = 0; i < e.size(); ++i)
        out.v[i] = e[i] / 255.0;
    return out;
}

RasterImage equalize_brightness(const RasterImage& image, const ClaheConfig& config, int working_depth,
                                HueFormula hue)
{
    if (image.channels() != 3 || image.depth() != 8)
        throw Error("equalize_brightness: expected 8-bit RGB image");
    return from_hsv_planes(equalize_value_plane(to_hsv_planes(image, hue), config, working_depth));
}

RasterImage adjust_gain_bias(const RasterImage& image, const GainBias& gb)
{
    if (image.depth() != 8)
        throw Error("adjust_gain_bias: expected 8-bit image");
    if (!(gb.gain > 0.0))
        throw Error("adjust_gain_bias: gain must be positive");
    RasterImage out = image;
    for (auto& s : out.data())
        s = static_cast<std::uint16_t>(std::clamp(std::floor(gb.gain * s + gb.bias + 0.5), 0.0, 255.0));
    return out;
}

double predicted_brightness(double brightness, double gain, double bias)
{
    return (gain * brightness * 255.0 + bias) / 255.0;
}

GainBias auto_gain_bias_for(double brightness, double ceiling)
{
    if (!(ceiling > 0.0 && ceiling <= 1.0))
        throw Error("auto_gain_bias: ceiling must lie in (0, 1]");
    constexpr double tolerance = 1e-12;
    auto admissible = [&](double gain, double bias) {
        return predicted_brightness(brightness, gain, bias) <= ceiling + tolerance;
    };
    for (int bias = 50; bias >= 0; bias -= 5)
        if (admissible(1.4, bias))
            return {1.4, static_cast<double>(bias), ceiling, false};
    for (int tenths = 13; tenths >= 10; --tenths)
        if (admissible(tenths / 10.0, 0.0))
            return {tenths / 10.0, 0.0, ceiling, false};
    return {1.0, 0.0, ceiling, true};
}

GainBias auto_gain_bias(const RasterImage& image, double ceiling, const LumaCoefficients& coeffs)
{
    return auto_gain_bias_for(mean_luma_brightness(image, coeffs), ceiling);
}

} // namespace docprep
