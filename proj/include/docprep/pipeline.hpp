#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docprep/binarize.hpp"
#include "docprep/colorspace.hpp"
#include "docprep/enhance.hpp"
#include "docprep/raster.hpp"
#include "docprep/sharpen.hpp"

namespace docprep {

struct PipelineConfig {
    ClaheConfig clahe;
    bool auto_gain_bias = true; // false: use gain_bias.gain / gain_bias.bias as given
    GainBias gain_bias;
    LumaMode luma_mode = LumaMode::standard;
    HueFormula hue_formula = HueFormula::hexcone;
    UnsharpConfig unsharp;
    Polarity polarity = Polarity::text_black;
    bool save_stages = false;
    int working_depth = 16;

    void validate() const;
};

/// Config parse failure. `line` is 0 for errors not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, std::string key, int line = 0)
        : Error(message), key_(std::move(key)), line_(line)
    {
    }
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

/// Stage failure, tagged with the stage number (1-6) and name.
class StageError : public Error {
public:
    StageError(int stage, const std::string& name, const std::string& message)
        : Error("stage " + std::to_string(stage) + " (" + name + "): " + message), stage_(stage)
    {
    }
    int stage() const { return stage_; }

private:
    int stage_;
};

/// Flat `key = value` document, '#' starts a comment. Omitted keys keep their
/// defaults; unknown or repeated keys are rejected.
PipelineConfig load_config(std::string_view text);

/// Applies one `key = value` setting, validating the value range.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Every key accepted by load_config / apply_setting.
const std::vector<std::string>& config_keys();

struct StageOutputs {
    std::optional<RasterImage> equalized; // absent for single-channel input
    std::optional<RasterImage> adjusted;
    RasterImage grayscale;
    RasterImage sharpened;
    BinaryImage binary;
    std::optional<GainBias> chosen_gain_bias;
    double brightness_before = 0.0;
    double brightness_after = 0.0;
    std::vector<std::string> warnings;
};

// Individual stages, so any saved artifact can be fed back in.
RasterImage stage_equalize(const RasterImage& rgb, const PipelineConfig& cfg);
GainBias stage_choose_gain_bias(const RasterImage& equalized, const PipelineConfig& cfg);
RasterImage stage_adjust(const RasterImage& rgb, const GainBias& gb);
RasterImage stage_grayscale(const RasterImage& rgb);
RasterImage stage_sharpen(const RasterImage& gray, const PipelineConfig& cfg);
BinaryImage stage_binarize(const RasterImage& sharpened, const PipelineConfig& cfg);

/// equalize -> estimate brightness and pick gain/bias -> adjust -> grayscale
/// -> unsharp mask -> Otsu binarization. Single-channel input skips the first
/// three stages with a warning; 16-bit input is narrowed to 8 bits first.
StageOutputs run_pipeline(const RasterImage& image, const PipelineConfig& cfg);

/// Writes `<stem>.stage<k>.pnm` for stages 1, 3, 4, 5 and `<stem>.stage6.pbm`.
/// Stage 2 yields parameters, not an image. Returns the paths written.
std::vector<std::string> write_stage_artifacts(const StageOutputs& out, const std::string& stem);

} // namespace docprep
