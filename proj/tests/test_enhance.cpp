#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "docprep/enhance.hpp"
#include "oracles.hpp"

using namespace docprep;

namespace {

Histogram make_histogram(std::vector<std::uint64_t> bins)
{
    Histogram h;
    h.total = std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
    h.bins = std::move(bins);
    return h;
}

int support_width(const std::vector<std::uint64_t>& bins)
{
    int lo = -1, hi = -1;
    for (int i = 0; i < static_cast<int>(bins.size()); ++i)
        if (bins[i]) {
            if (lo < 0)
                lo = i;
            hi = i;
        }
    return hi - lo;
}

} // namespace

TEST_CASE("clip limit hand values")
{
    CHECK(clip_limit(4096, 256, 0, 4) == doctest::Approx(16));
    CHECK(clip_limit(4096, 256, 50, 4) == doctest::Approx(40));
    CHECK(clip_limit(4096, 256, 100, 4) == doctest::Approx(64));
    ClaheConfig cfg;
    cfg.clip_limit_override = 12.5;
    CHECK(clip_limit(cfg, 4096) == 12.5);
}

TEST_CASE("clip limit is monotone in the clip factor and the slope")
{
    for (double a = 0; a < 100; a += 5)
        CHECK(clip_limit(1000, 256, a + 5, 4) > clip_limit(1000, 256, a, 4));
    for (double s = 1.5; s < 10; s += 0.5)
        CHECK(clip_limit(1000, 256, 30, s + 0.5) > clip_limit(1000, 256, 30, s));
    CHECK(clip_limit(1000, 256, 0, 9) == 1000.0 / 256);
}

TEST_CASE("mapping of a uniform histogram is a linear ramp")
{
    auto h = make_histogram(std::vector<std::uint64_t>(256, 10));
    auto map = clipped_mapping(h, 1e9, 0, 255);
    for (int k = 0; k < 256; ++k)
        CHECK(map.lut[k] == static_cast<std::uint32_t>(std::floor(255.0 * (k + 1) / 256 + 0.5)));
    CHECK(map.cdf.back() == doctest::Approx(1.0));
}

TEST_CASE("mapping of spikes")
{
    std::vector<std::uint64_t> one(256, 0);
    one[77] = 500;
    for (double limit : {500.0, 1e6})
        CHECK(clipped_mapping(make_histogram(one), limit, 0, 65535).lut[77] == 65535);
    // a tight limit spreads the spike, flattening the map towards a ramp
    auto spread = clipped_mapping(make_histogram(one), 1.0, 0, 65535);
    CHECK(spread.lut[77] < 65535);
    CHECK(spread.lut[255] == 65535);
    for (int k = 1; k < 256; ++k)
        CHECK(spread.lut[k] >= spread.lut[k - 1]);

    std::vector<std::uint64_t> two(256, 0);
    two[0] = 100;
    two[255] = 100;
    auto map = clipped_mapping(make_histogram(two), 1e6, 10, 200);
    CHECK(map.lut[0] == 105); // round(0.5 * 190 + 10)
    CHECK(map.lut[255] == 200);
    CHECK_THROWS_AS(clipped_mapping(Histogram{std::vector<std::uint64_t>(4, 0), 0}, 1, 0, 255), Error);
}

TEST_CASE("clipping conserves mass and mappings are monotone")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::uint64_t> bins(256);
        const int mode = trial % 3;
        for (auto& b : bins)
            b = mode == 0 ? rng() % 50 : (rng() % 10 == 0 ? rng() % 2000 : 0);
        if (mode == 2)
            bins[rng() % 256] += 5000;
        auto h = make_histogram(bins);
        if (h.total == 0)
            continue;
        const double limit = 1.0 + static_cast<double>(rng() % 200);
        auto clipped = clip_histogram(h, limit);
        const double mass = std::accumulate(clipped.begin(), clipped.end(), 0.0);
        CHECK(mass == doctest::Approx(static_cast<double>(h.total)).epsilon(1e-9));

        auto map = clipped_mapping(h, limit, 0, 65535);
        CHECK(std::is_sorted(map.lut.begin(), map.lut.end()));
        CHECK(std::is_sorted(map.cdf.begin(), map.cdf.end()));
        CHECK(map.cdf.back() == doctest::Approx(1.0));
        CHECK(map.lut.back() <= 65535u);
    }
}

TEST_CASE("clahe keeps a constant plane constant")
{
    RasterImage flat(64, 48, 1, 8, 90);
    auto out = clahe_apply(flat, ClaheConfig{});
    for (auto v : out.data())
        CHECK(v == out.data()[0]);
}

TEST_CASE("single tile without clipping is global equalization")
{
    std::mt19937_64 rng(4);
    ClaheConfig cfg;
    cfg.tiles_x = cfg.tiles_y = 1;
    cfg.clip_limit_override = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10; ++trial) {
        auto plane = oracle::random_plane(rng, 31 + trial, 17 + trial, 20, 200);
        CHECK(clahe_apply(plane, cfg) == oracle::global_equalize(plane));
    }
}

TEST_CASE("low-contrast ramp is stretched toward the display range")
{
    RasterImage ramp(256, 64, 1, 8);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 256; ++x)
            ramp.at(y, x) = static_cast<std::uint16_t>(100 + x * 51 / 256);
    ClaheConfig cfg;
    cfg.tiles_x = cfg.tiles_y = 1;
    cfg.clip_limit_override = std::numeric_limits<double>::infinity();
    auto out = clahe_apply(ramp, cfg);
    auto [lo, hi] = std::minmax_element(out.data().begin(), out.data().end());
    CHECK(*hi >= 253);
    // the lowest level keeps its own share of the CDF, ~1/51 of the span
    CHECK(*lo <= 2 + 255 / 51 + 2);
    for (int y = 0; y < 64; ++y)
        CHECK(std::is_sorted(&out.at(y, 0), &out.at(y, 0) + 256));
}

TEST_CASE("clahe rejects planes smaller than the tile grid")
{
    CHECK_THROWS_AS(clahe_apply(RasterImage(4, 20, 1, 8), ClaheConfig{}), Error);
    ClaheConfig bad;
    bad.clip_factor = 150;
    CHECK_THROWS_AS(clahe_apply(RasterImage(40, 40, 1, 8), bad), Error);
}

TEST_CASE("equalize_brightness keeps neutral pixels neutral")
{
    std::mt19937_64 rng(8);
    auto plane = oracle::random_plane(rng, 40, 30, 60, 140);
    RasterImage rgb(40, 30, 3, 8);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x)
            for (int c = 0; c < 3; ++c)
                rgb.at(y, x, c) = plane.at(y, x);
    auto out = equalize_brightness(rgb, ClaheConfig{});
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x) {
            CHECK(out.at(y, x, 0) == out.at(y, x, 1));
            CHECK(out.at(y, x, 1) == out.at(y, x, 2));
        }
}

TEST_CASE("value equalization leaves hue and saturation planes untouched")
{
    std::mt19937_64 rng(12);
    auto planes = to_hsv_planes(oracle::random_rgb(rng, 48, 40));
    for (int depth : {8, 16}) {
        auto out = equalize_value_plane(planes, ClaheConfig{}, depth);
        CHECK(out.h == planes.h);
        CHECK(out.s == planes.s);
        CHECK(out.v != planes.v);
    }
}

TEST_CASE("equalize_brightness preserves hue of chromatic pixels")
{
    std::mt19937_64 rng(13);
    auto img = oracle::random_rgb(rng, 64, 48);
    auto out = equalize_brightness(img, ClaheConfig{});
    int checked = 0;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 64; ++x) {
            auto o = pixel_at(out, y, x);
            // hue of a pixel is only resolvable to ~60/(max-min) degrees
            if (std::max({o.r, o.g, o.b}) - std::min({o.r, o.g, o.b}) < 64)
                continue;
            double d = std::abs(rgb_to_hsv(o).h - rgb_to_hsv(pixel_at(img, y, x)).h);
            d = std::min(d, 360.0 - d);
            CHECK(d <= 1.0);
            ++checked;
        }
    CHECK(checked > 500);
}

TEST_CASE("equalization widens the value histogram of a dull page")
{
    // light grey page with mid-grey strokes, crowded into [120, 175]
    std::mt19937_64 rng(17);
    RasterImage page(96, 64, 3, 8);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 96; ++x) {
            const bool ink = (y % 8 < 2) && (x % 12 < 8);
            const int v = (ink ? 125 : 165) + static_cast<int>(rng() % 9) - 4 + x / 24;
            page.at(y, x, 0) = static_cast<std::uint16_t>(v);
            page.at(y, x, 1) = static_cast<std::uint16_t>(v - 2);
            page.at(y, x, 2) = static_cast<std::uint16_t>(v - 6);
        }
    auto before = to_hsv_planes(page);
    auto after = to_hsv_planes(equalize_brightness(page, ClaheConfig{}));
    std::vector<std::uint64_t> hb(256, 0), ha(256, 0);
    for (std::size_t i = 0; i < before.v.size(); ++i) {
        ++hb[static_cast<int>(std::lround(before.v[i] * 255))];
        ++ha[static_cast<int>(std::lround(after.v[i] * 255))];
    }
    CHECK(support_width(ha) >= support_width(hb));
    CHECK(2 * support_width(ha) > 3 * support_width(hb));
}

TEST_CASE("gain and bias")
{
    RasterImage img(3, 1, 1, 8, std::vector<std::uint16_t>{100, 200, 0});
    auto out = adjust_gain_bias(img, {1.4, 50});
    CHECK(out.at(0, 0) == 190);
    CHECK(out.at(0, 1) == 255);
    CHECK(out.at(0, 2) == 50);
    CHECK(adjust_gain_bias(img, {1.0, 0.0}) == img);
    CHECK_THROWS_AS(adjust_gain_bias(img, {0.0, 0.0}), Error);
}

TEST_CASE("automatic gain and bias")
{
    auto mid = auto_gain_bias_for(0.5, 0.93);
    CHECK(mid.gain == 1.4);
    CHECK(mid.bias == 50);
    CHECK(predicted_brightness(0.5, 1.4, 50) == doctest::Approx(0.896).epsilon(1e-3));

    const auto coeffs = LumaCoefficients::for_mode(LumaMode::standard);
    auto black = auto_gain_bias(RasterImage(8, 8, 3, 8, 0), 0.93, coeffs);
    CHECK(black.gain == 1.4);
    CHECK(black.bias == 50);

    auto edge = auto_gain_bias_for(0.93, 0.93);
    CHECK(predicted_brightness(0.93, edge.gain, edge.bias) <= 0.93 + 1e-12);
    CHECK_FALSE(edge.ceiling_unreachable);
    CHECK(edge.gain == 1.0);
    CHECK(edge.bias == 0.0);

    // first admissible step: 1.4 * 0.6 + b / 255 <= 0.93 gives b <= 22.95
    auto step = auto_gain_bias_for(0.6, 0.93);
    CHECK(step.gain == 1.4);
    CHECK(step.bias == 20);

    auto bright = auto_gain_bias_for(0.97, 0.93);
    CHECK(bright.ceiling_unreachable);
    CHECK(bright.gain == 1.0);
    CHECK(bright.bias == 0.0);
}

TEST_CASE("auto gain/bias keeps measured brightness under the ceiling")
{
    std::mt19937_64 rng(99);
    const auto coeffs = LumaCoefficients::for_mode(LumaMode::standard);
    for (int trial = 0; trial < 40; ++trial) {
        const int base = static_cast<int>(rng() % 200);
        RasterImage img(24, 24, 3, 8);
        for (auto& v : img.data())
            v = static_cast<std::uint16_t>(std::min(255, base + static_cast<int>(rng() % 56)));
        auto gb = auto_gain_bias(img, 0.93, coeffs);
        if (gb.ceiling_unreachable)
            continue;
        CHECK(mean_luma_brightness(adjust_gain_bias(img, gb), coeffs) <= 0.93 + 0.02);
    }
}
