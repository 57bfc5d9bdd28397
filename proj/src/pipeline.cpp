#include "docprep/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace docprep {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void range_error(std::string_view key, std::string_view value, const char* rule)
{
    throw ConfigError(std::string(key) + ": value '" + std::string(value) + "' out of range (" + rule + ")",
                      std::string(key));
}

double parse_real(std::string_view key, std::string_view value)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'",
                          std::string(key));
    return out;
}

long long parse_int(std::string_view key, std::string_view value)
{
    long long out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(value) + "'",
                          std::string(key));
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'",
                      std::string(key));
}

using Setter = std::function<void(PipelineConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"clahe.tiles_x",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n < 1 || n > 4096)
                 range_error(k, v, "must be in [1, 4096]");
             c.clahe.tiles_x = static_cast<int>(n);
         }},
        {"clahe.tiles_y",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n < 1 || n > 4096)
                 range_error(k, v, "must be in [1, 4096]");
             c.clahe.tiles_y = static_cast<int>(n);
         }},
        {"clahe.clip_factor",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (x < 0.0 || x > 100.0)
                 range_error(k, v, "must be in [0, 100]");
             c.clahe.clip_factor = x;
         }},
        {"clahe.slope_max",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (!(x > 1.0))
                 range_error(k, v, "must be > 1");
             c.clahe.slope_max = x;
         }},
        {"clahe.gray_levels",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n < 2 || n > 65536)
                 range_error(k, v, "must be in [2, 65536]");
             c.clahe.gray_levels = static_cast<int>(n);
         }},
        {"clahe.clip_limit",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (!(x > 0.0))
                 range_error(k, v, "must be > 0");
             c.clahe.clip_limit_override = x;
         }},
        {"clahe.display_min",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n < 0 || n > 65535)
                 range_error(k, v, "must be in [0, 65535]");
             c.clahe.display_min = static_cast<std::uint32_t>(n);
         }},
        {"clahe.display_max",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n < 0 || n > 65535)
                 range_error(k, v, "must be in [0, 65535]");
             c.clahe.display_max = static_cast<std::uint32_t>(n);
         }},
        {"gain_bias.mode",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             if (v == "auto")
                 c.auto_gain_bias = true;
             else if (v == "fixed")
                 c.auto_gain_bias = false;
             else
                 range_error(k, v, "must be auto or fixed");
         }},
        {"gain_bias.gain",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (!(x > 0.0))
                 range_error(k, v, "must be > 0");
             c.gain_bias.gain = x;
         }},
        {"gain_bias.bias",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (x < -255.0 || x > 255.0)
                 range_error(k, v, "must be in [-255, 255]");
             c.gain_bias.bias = x;
         }},
        {"gain_bias.ceiling",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (!(x > 0.0 && x <= 1.0))
                 range_error(k, v, "must be in (0, 1]");
             c.gain_bias.ceiling = x;
         }},
        {"luma_mode",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             if (v == "standard")
                 c.luma_mode = LumaMode::standard;
             else if (v == "paper-literal")
                 c.luma_mode = LumaMode::paper_literal;
             else
                 range_error(k, v, "must be standard or paper-literal");
         }},
        {"hue_formula",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             if (v == "hexcone")
                 c.hue_formula = HueFormula::hexcone;
             else if (v == "arccos")
                 c.hue_formula = HueFormula::arccos;
             else
                 range_error(k, v, "must be hexcone or arccos");
         }},
        {"unsharp.amount",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (x < 0.0)
                 range_error(k, v, "must be >= 0");
             c.unsharp.amount = x;
         }},
        {"unsharp.radius",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto x = parse_real(k, v);
             if (!(x > 0.0) || x > 100.0)
                 range_error(k, v, "must be in (0, 100]");
             c.unsharp.radius = x;
         }},
        {"unsharp.threshold",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n < 0 || n > 255)
                 range_error(k, v, "must be in [0, 255]");
             c.unsharp.threshold = static_cast<int>(n);
         }},
        {"unsharp.kernel_size",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n < 3 || n % 2 == 0 || n > 1001)
                 range_error(k, v, "must be odd and in [3, 1001]");
             c.unsharp.kernel_size = static_cast<int>(n);
         }},
        {"binarize.polarity",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             if (v == "text-black")
                 c.polarity = Polarity::text_black;
             else if (v == "text-white")
                 c.polarity = Polarity::text_white;
             else
                 range_error(k, v, "must be text-black or text-white");
         }},
        {"save_stages",
         [](PipelineConfig& c, std::string_view k, std::string_view v) { c.save_stages = parse_bool(k, v); }},
        {"working_depth",
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             auto n = parse_int(k, v);
             if (n != 8 && n != 16)
                 range_error(k, v, "must be 8 or 16");
             c.working_depth = static_cast<int>(n);
         }},
    };
    return table;
}

} // namespace

void PipelineConfig::validate() const
{
    clahe.validate();
    unsharp.validate();
    if (!(gain_bias.gain > 0.0))
        throw Error("gain_bias.gain must be positive");
    if (!(gain_bias.ceiling > 0.0 && gain_bias.ceiling <= 1.0))
        throw Error("gain_bias.ceiling must lie in (0, 1]");
    if (working_depth != 8 && working_depth != 16)
        throw Error("working_depth must be 8 or 16");
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value)
{
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end())
        throw ConfigError("unknown config key '" + std::string(key) + "'", std::string(key));
    it->second(cfg, key, trim(value));
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : setters())
            out.push_back(k);
        return out;
    }();
    return keys;
}

PipelineConfig load_config(std::string_view text)
{
    PipelineConfig cfg;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", "", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": missing key", "", line_no);
        if (!seen.insert(std::string(key)).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'",
                              std::string(key), line_no);
        try {
            apply_setting(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what(), e.key(), line_no);
        }
    }
    if (cfg.clahe.display_min && cfg.clahe.display_max && *cfg.clahe.display_min > *cfg.clahe.display_max)
        throw ConfigError("clahe.display_min exceeds clahe.display_max", "clahe.display_min");
    return cfg;
}

namespace {

template <typename F>
auto run_stage(int stage, const char* name, F&& f)
{
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, name, e.what());
    }
}

RasterImage require_rgb8(const RasterImage& image, const char* what)
{
    if (image.channels() != 3 || image.depth() != 8)
        throw Error(std::string(what) + ": expected 8-bit RGB image");
    return image;
}

} // namespace

RasterImage stage_equalize(const RasterImage& rgb, const PipelineConfig& cfg)
{
    return equalize_brightness(require_rgb8(rgb, "equalize"), cfg.clahe, cfg.working_depth, cfg.hue_formula);
}

GainBias stage_choose_gain_bias(const RasterImage& equalized, const PipelineConfig& cfg)
{
    if (!cfg.auto_gain_bias)
        return cfg.gain_bias;
    return auto_gain_bias(equalized, cfg.gain_bias.ceiling, LumaCoefficients::for_mode(cfg.luma_mode));
}

RasterImage stage_adjust(const RasterImage& rgb, const GainBias& gb)
{
    return adjust_gain_bias(require_rgb8(rgb, "adjust"), gb);
}

RasterImage stage_grayscale(const RasterImage& rgb)
{
    return to_grayscale_luminance(require_rgb8(rgb, "grayscale"));
}

RasterImage stage_sharpen(const RasterImage& gray, const PipelineConfig& cfg)
{
    if (gray.channels() != 1)
        throw Error("sharpen: expected single-channel image");
    return unsharp_mask(gray, cfg.unsharp);
}

BinaryImage stage_binarize(const RasterImage& sharpened, const PipelineConfig& cfg)
{
    if (sharpened.channels() != 1)
        throw Error("binarize: expected single-channel image");
    return binarize_otsu(sharpened, cfg.polarity);
}

StageOutputs run_pipeline(const RasterImage& image, const PipelineConfig& cfg)
{
    cfg.validate();
    StageOutputs out;
    RasterImage input = image;
    if (input.depth() == 16) {
        out.warnings.push_back("16-bit input narrowed to 8 bits");
        input = convert_depth(input, 8);
    }

    if (input.channels() == 1) {
        out.warnings.push_back("single-channel input: equalization and gain/bias stages skipped");
        out.grayscale = input;
    } else {
        const auto coeffs = LumaCoefficients::for_mode(cfg.luma_mode);
        out.equalized = run_stage(1, "equalize", [&] { return stage_equalize(input, cfg); });
        auto gb = run_stage(2, "brightness", [&] {
            out.brightness_before = mean_luma_brightness(*out.equalized, coeffs);
            return stage_choose_gain_bias(*out.equalized, cfg);
        });
        if (gb.ceiling_unreachable)
            out.warnings.push_back("brightness ceiling unreachable; gain/bias left at identity");
        out.chosen_gain_bias = gb;
        out.adjusted = run_stage(3, "adjust", [&] { return stage_adjust(*out.equalized, gb); });
        out.brightness_after = mean_luma_brightness(*out.adjusted, coeffs);
        out.grayscale = run_stage(4, "grayscale", [&] { return stage_grayscale(*out.adjusted); });
    }
    out.sharpened = run_stage(5, "sharpen", [&] { return stage_sharpen(out.grayscale, cfg); });
    out.binary = run_stage(6, "binarize", [&] { return stage_binarize(out.sharpened, cfg); });
    return out;
}

std::vector<std::string> write_stage_artifacts(const StageOutputs& out, const std::string& stem)
{
    std::vector<std::string> written;
    auto put = [&](int stage, const RasterImage& image) {
        auto path = stem + ".stage" + std::to_string(stage) + ".pnm";
        write_file(path, encode_pnm(image));
        written.push_back(path);
    };
    if (out.equalized)
        put(1, *out.equalized);
    if (out.adjusted)
        put(3, *out.adjusted);
    put(4, out.grayscale);
    put(5, out.sharpened);
    auto path = stem + ".stage6.pbm";
    write_file(path, encode_pbm(out.binary));
    written.push_back(path);
    return written;
}

} // namespace docprep
