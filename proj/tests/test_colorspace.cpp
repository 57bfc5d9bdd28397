#include <doctest.h>

#include <cmath>
#include <random>

#include "docprep/colorspace.hpp"
#include "oracles.hpp"

using namespace docprep;

TEST_CASE("rgb_to_hsv reference pixels")
{
    auto red = rgb_to_hsv({255, 0, 0});
    CHECK(red.h == doctest::Approx(0.0));
    CHECK(red.s == doctest::Approx(1.0));
    CHECK(red.v == doctest::Approx(1.0));

    auto gray = rgb_to_hsv({128, 128, 128});
    CHECK(gray.h == 0.0);
    CHECK(gray.s == 0.0);
    CHECK(gray.v == doctest::Approx(128.0 / 255.0));

    for (auto formula : {HueFormula::hexcone, HueFormula::arccos}) {
        auto green = rgb_to_hsv({0, 255, 0}, formula);
        CHECK(green.h == doctest::Approx(120.0));
        CHECK(green.s == doctest::Approx(1.0));
        auto blue = rgb_to_hsv({0, 0, 255}, formula);
        CHECK(blue.h == doctest::Approx(240.0));
        CHECK(rgb_to_hsv({0, 0, 0}, formula).s == 0.0);
    }
}

TEST_CASE("arccos hue follows the printed formula")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        RgbPixel p{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                   static_cast<std::uint8_t>(rng())};
        if (p.r == p.g && p.g == p.b)
            continue;
        const double r = p.r, g = p.g, b = p.b;
        const double num = r - 0.5 * g - 0.5 * b;
        const double den = std::sqrt(r * r + g * g + b * b - r * g - r * b - g * b);
        double h = std::acos(std::clamp(num / den, -1.0, 1.0)) * 180.0 / M_PI;
        if (b > g)
            h = 360.0 - h;
        if (h >= 360.0)
            h -= 360.0;
        CHECK(rgb_to_hsv(p, HueFormula::arccos).h == doctest::Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("both hue formulas agree on primaries and secondaries")
{
    const RgbPixel pixels[] = {{255, 0, 0}, {255, 255, 0}, {0, 255, 0}, {0, 255, 255}, {0, 0, 255}, {255, 0, 255}};
    for (auto p : pixels)
        CHECK(rgb_to_hsv(p, HueFormula::hexcone).h ==
              doctest::Approx(rgb_to_hsv(p, HueFormula::arccos).h).epsilon(1e-9));
}

TEST_CASE("hsv_to_rgb reference pixels")
{
    CHECK(hsv_to_rgb({0, 1, 1}) == RgbPixel{255, 0, 0});
    CHECK(hsv_to_rgb({120, 1, 1}) == RgbPixel{0, 255, 0});
    CHECK(hsv_to_rgb({240, 1, 1}) == RgbPixel{0, 0, 255});
    CHECK(hsv_to_rgb({200, 0, 0.5}) == RgbPixel{128, 128, 128});
}

TEST_CASE("value is max/255 and neutrals have zero hue and saturation")
{
    for (int r = 0; r < 256; r += 5)
        for (int g = 0; g < 256; g += 7)
            for (int b = 0; b < 256; b += 11) {
                RgbPixel p{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
                auto hsv = rgb_to_hsv(p);
                CHECK(hsv.v == std::max({r, g, b}) / 255.0);
                CHECK(hsv.h >= 0.0);
                CHECK(hsv.h < 360.0);
            }
    for (int v = 0; v < 256; ++v) {
        auto hsv = rgb_to_hsv({static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v)});
        CHECK(hsv.h == 0.0);
        CHECK(hsv.s == 0.0);
    }
}

TEST_CASE("hexcone roundtrip is exact on random pixels")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20000; ++i) {
        RgbPixel p{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                   static_cast<std::uint8_t>(rng())};
        CHECK(hsv_to_rgb(rgb_to_hsv(p)) == p);
    }
}

TEST_CASE("luma")
{
    const auto standard = LumaCoefficients::for_mode(LumaMode::standard);
    const auto literal = LumaCoefficients::for_mode(LumaMode::paper_literal);
    CHECK(luma({255, 255, 255}, standard) == doctest::Approx(255.0));
    CHECK(luma({0, 0, 0}, literal) == 0.0);
    CHECK(luma({255, 255, 255}, literal) == doctest::Approx(262.65));
    // monotone in each channel and bounded
    for (int v = 1; v < 256; ++v) {
        auto u = static_cast<std::uint8_t>(v), d = static_cast<std::uint8_t>(v - 1);
        CHECK(luma({u, 10, 10}, standard) > luma({d, 10, 10}, standard));
        CHECK(luma({10, u, 10}, standard) > luma({10, d, 10}, standard));
        CHECK(luma({10, 10, u}, standard) > luma({10, 10, d}, standard));
    }
}

TEST_CASE("mean luma brightness")
{
    const auto standard = LumaCoefficients::for_mode(LumaMode::standard);
    CHECK(mean_luma_brightness(RasterImage(4, 4, 3, 8, 255), standard) == doctest::Approx(1.0));
    CHECK(mean_luma_brightness(RasterImage(4, 4, 3, 8, 0), standard) == 0.0);
    RasterImage half(4, 2, 3, 8, 0);
    for (int x = 0; x < 4; ++x)
        for (int c = 0; c < 3; ++c)
            half.at(0, x, c) = 255;
    CHECK(mean_luma_brightness(half, standard) == doctest::Approx(0.5));
    CHECK_THROWS_AS(mean_luma_brightness(RasterImage(2, 2, 1, 8), standard), Error);
}

TEST_CASE("luminance grayscale")
{
    auto gray = to_grayscale_luminance(RasterImage(3, 3, 3, 8, 100));
    for (auto v : gray.data())
        CHECK(v == 100);

    RasterImage px(2, 1, 3, 8, 0);
    px.at(0, 0, 0) = 255; // 0.3 * 255 = 76.5
    px.at(0, 1, 2) = 255; // 0.11 * 255 = 28.05
    auto out = to_grayscale_luminance(px);
    CHECK(out.at(0, 0) == 77);
    CHECK(out.at(0, 1) == 28);
}

TEST_CASE("grayscale of equal channels is the identity")
{
    std::mt19937_64 rng(9);
    auto plane = oracle::random_plane(rng, 16, 16);
    RasterImage rgb(16, 16, 3, 8);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            for (int c = 0; c < 3; ++c)
                rgb.at(y, x, c) = plane.at(y, x);
    CHECK(to_grayscale_luminance(rgb) == plane);
}

TEST_CASE("hsv planes roundtrip an image")
{
    std::mt19937_64 rng(2);
    auto img = oracle::random_rgb(rng, 13, 9);
    CHECK(from_hsv_planes(to_hsv_planes(img)) == img);
}
