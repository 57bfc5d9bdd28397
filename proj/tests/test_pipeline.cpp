#include <doctest.h>

#include <map>
#include <random>
#include <string>

#include "docprep/pipeline.hpp"
#include "docprep/synth.hpp"
#include "oracles.hpp"

using namespace docprep;

namespace {

// F1 of the ink class (value 0) against the truth mask.
double ink_f1(const BinaryImage& got, const BinaryImage& truth)
{
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < got.data().size(); ++i) {
        const bool g = got.data()[i] == 0, t = truth.data()[i] == 0;
        tp += g && t;
        fp += g && !t;
        fn += !g && t;
    }
    return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

double disagreement(const BinaryImage& a, const BinaryImage& b)
{
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        d += a.data()[i] != b.data()[i];
    return static_cast<double>(d) / static_cast<double>(a.data().size());
}

SynthDocSpec degraded_spec(int seed)
{
    SynthDocSpec spec;
    spec.ink = {100, 98, 108};
    spec.gradient_strength = 0.5;
    spec.gradient_angle = (seed * 37) % 360;
    spec.noise_sigma = 2.0;
    spec.blur_radius = 0.5;
    return spec;
}

std::string message_of(const std::string& text)
{
    try {
        load_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("empty config yields the defaults")
{
    auto cfg = load_config("");
    CHECK(cfg.clahe.slope_max == 4.0);
    CHECK(cfg.clahe.clip_factor == 100.0);
    CHECK(cfg.clahe.tiles_x == 8);
    CHECK(cfg.unsharp.amount == 1.5);
    CHECK(cfg.unsharp.radius == 0.5);
    CHECK(cfg.unsharp.threshold == 0);
    CHECK(cfg.gain_bias.gain == 1.4);
    CHECK(cfg.gain_bias.bias == 50.0);
    CHECK(cfg.gain_bias.ceiling == 0.93);
    CHECK(cfg.auto_gain_bias);
    CHECK(cfg.polarity == Polarity::text_black);
    CHECK(cfg.working_depth == 16);
    CHECK(load_config("# nothing here\n\n   \n").unsharp.amount == 1.5);
}

TEST_CASE("config values are parsed and typed")
{
    auto cfg = load_config("unsharp.amount = 0.75\n"
                           "clahe.tiles_x=4  # narrower grid\n"
                           "gain_bias.mode = fixed\n"
                           "gain_bias.gain = 1.2\n"
                           "luma_mode = paper-literal\n"
                           "binarize.polarity = text-white\n"
                           "working_depth = 8\n");
    CHECK(cfg.unsharp.amount == 0.75);
    CHECK(cfg.clahe.tiles_x == 4);
    CHECK_FALSE(cfg.auto_gain_bias);
    CHECK(cfg.gain_bias.gain == 1.2);
    CHECK(cfg.luma_mode == LumaMode::paper_literal);
    CHECK(cfg.polarity == Polarity::text_white);
    CHECK(cfg.working_depth == 8);
}

TEST_CASE("config errors name the key and line")
{
    try {
        load_config("unsharp.radius = 1\nunsharp.amount = -1\n");
        FAIL("expected a range error");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "unsharp.amount");
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("unsharp.amount") != std::string::npos);
    }
    try {
        load_config("foo = 1\n");
        FAIL("expected an unknown-key error");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "foo");
        CHECK(e.line() == 1);
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    CHECK(message_of("\n\nclahe.tiles_x\n").find("line 3") != std::string::npos);
    CHECK(message_of("unsharp.amount = 1\nunsharp.amount = 2\n").find("unsharp.amount") != std::string::npos);
    CHECK(message_of("unsharp.kernel_size = 4\n").find("unsharp.kernel_size") != std::string::npos);
    CHECK(message_of("clahe.tiles_x = three\n").find("clahe.tiles_x") != std::string::npos);
    CHECK(message_of("working_depth = 12\n").find("working_depth") != std::string::npos);
}

TEST_CASE("every advertised key is accepted")
{
    const std::map<std::string, std::string> samples = {
        {"clahe.tiles_x", "4"},          {"clahe.tiles_y", "6"},        {"clahe.clip_factor", "50"},
        {"clahe.slope_max", "3"},        {"clahe.gray_levels", "128"},  {"clahe.clip_limit", "12"},
        {"clahe.display_min", "0"},      {"clahe.display_max", "255"},  {"gain_bias.mode", "fixed"},
        {"gain_bias.gain", "1.1"},       {"gain_bias.bias", "10"},      {"gain_bias.ceiling", "0.9"},
        {"luma_mode", "standard"},       {"hue_formula", "arccos"},     {"unsharp.amount", "2"},
        {"unsharp.radius", "1.0"},       {"unsharp.threshold", "3"},    {"unsharp.kernel_size", "5"},
        {"binarize.polarity", "text-black"}, {"save_stages", "true"},   {"working_depth", "8"},
    };
    CHECK(config_keys().size() == samples.size());
    for (const auto& key : config_keys()) {
        REQUIRE(samples.count(key) == 1);
        PipelineConfig cfg;
        CHECK_NOTHROW(apply_setting(cfg, key, samples.at(key)));
        CHECK_NOTHROW(cfg.validate());
    }
}

TEST_CASE("output dimensions equal the input's")
{
    std::mt19937_64 rng(8);
    for (auto [w, h] : {std::pair{40, 30}, std::pair{17, 53}, std::pair{64, 64}}) {
        auto img = oracle::random_rgb(rng, w, h);
        auto out = run_pipeline(img, PipelineConfig{});
        for (const RasterImage* r : {&*out.equalized, &*out.adjusted, &out.grayscale, &out.sharpened}) {
            CHECK(r->width() == w);
            CHECK(r->height() == h);
        }
        CHECK(out.binary.width() == w);
        CHECK(out.binary.height() == h);
        CHECK(out.equalized->channels() == 3);
        CHECK(out.grayscale.channels() == 1);
    }
}

TEST_CASE("pipeline is deterministic")
{
    auto doc = synth_document(degraded_spec(3), 3);
    auto a = run_pipeline(doc.image, PipelineConfig{});
    auto b = run_pipeline(doc.image, PipelineConfig{});
    CHECK(*a.equalized == *b.equalized);
    CHECK(*a.adjusted == *b.adjusted);
    CHECK(a.sharpened == b.sharpened);
    CHECK(a.binary == b.binary);
}

TEST_CASE("each stage reproduces from the previous artifact")
{
    auto doc = synth_document(degraded_spec(4), 4);
    PipelineConfig cfg;
    auto out = run_pipeline(doc.image, cfg);

    // stages re-run on decoded artifacts, as a user chaining files would
    auto eq = decode_pnm(encode_pnm(stage_equalize(doc.image, cfg)));
    CHECK(eq == *out.equalized);
    auto gb = stage_choose_gain_bias(eq, cfg);
    CHECK(gb.gain == out.chosen_gain_bias->gain);
    CHECK(gb.bias == out.chosen_gain_bias->bias);
    auto adj = decode_pnm(encode_pnm(stage_adjust(eq, gb)));
    CHECK(adj == *out.adjusted);
    auto gray = decode_pnm(encode_pnm(stage_grayscale(adj)));
    CHECK(gray == out.grayscale);
    auto sharp = decode_pnm(encode_pnm(stage_sharpen(gray, cfg)));
    CHECK(sharp == out.sharpened);
    CHECK(decode_pbm(encode_pbm(stage_binarize(sharp, cfg))) == out.binary);
}

TEST_CASE("neutral input stays neutral through adjustment")
{
    std::mt19937_64 rng(12);
    auto plane = oracle::random_plane(rng, 48, 32);
    RasterImage rgb(48, 32, 3, 8);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 48; ++x)
            for (int c = 0; c < 3; ++c)
                rgb.at(y, x, c) = plane.at(y, x);
    auto out = run_pipeline(rgb, PipelineConfig{});
    for (const RasterImage* r : {&*out.equalized, &*out.adjusted})
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 48; ++x) {
                CHECK(r->at(y, x, 0) == r->at(y, x, 1));
                CHECK(r->at(y, x, 1) == r->at(y, x, 2));
            }
}

TEST_CASE("ideal page binarizes to its text mask")
{
    SynthDocSpec spec;
    spec.ink = {0, 0, 0};
    spec.paper = {255, 255, 255};
    spec.lines = {"THE QUICK BROWN FOX", "jumps over 13 lazy dogs."};
    auto doc = synth_document(spec, 1);
    CHECK(run_pipeline(doc.image, PipelineConfig{}).binary == doc.truth_mask);
}

TEST_CASE("pipeline beats direct Otsu under an illumination gradient")
{
    for (int seed = 1; seed <= 3; ++seed) {
        auto doc = synth_document(degraded_spec(seed), static_cast<std::uint64_t>(seed));
        auto piped = run_pipeline(doc.image, PipelineConfig{}).binary;
        auto direct = binarize_otsu(to_grayscale_luminance(doc.image));
        CHECK(ink_f1(piped, doc.truth_mask) > ink_f1(direct, doc.truth_mask));
        CHECK(disagreement(direct, doc.truth_mask) > 0.05);
        CHECK(disagreement(piped, doc.truth_mask) < 0.02);
    }
}

TEST_CASE("single-channel and 16-bit inputs warn and still run")
{
    std::mt19937_64 rng(21);
    auto gray = oracle::random_plane(rng, 20, 20);
    auto out = run_pipeline(gray, PipelineConfig{});
    CHECK_FALSE(out.equalized.has_value());
    CHECK_FALSE(out.chosen_gain_bias.has_value());
    CHECK(out.grayscale == gray);
    CHECK(out.warnings.size() == 1);

    auto rgb = oracle::random_rgb(rng, 20, 20);
    auto wide = run_pipeline(convert_depth(rgb, 16), PipelineConfig{});
    CHECK(wide.binary == run_pipeline(rgb, PipelineConfig{}).binary);
    CHECK(wide.warnings.size() >= 1);
}

TEST_CASE("stage failures carry the stage identity")
{
    PipelineConfig cfg;
    cfg.unsharp.radius = 6.0; // 37x37 kernel
    auto img = RasterImage(12, 12, 3, 8, 120);
    try {
        run_pipeline(img, cfg);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == 5);
        CHECK(std::string(e.what()).rfind("stage 5 (sharpen)", 0) == 0);
    }
}

TEST_CASE("zero-degradation page matches the mask almost everywhere")
{
    for (std::uint64_t seed : {2u, 9u}) {
        auto doc = synth_document(SynthDocSpec{}, seed);
        CHECK(disagreement(run_pipeline(doc.image, PipelineConfig{}).binary, doc.truth_mask) <= 0.01);
    }
}
