#include "docprep/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <optional>

#include <unistd.h>

#include <CLI11.hpp>

#include "docprep/evalharness.hpp"
#include "docprep/pipeline.hpp"
#include "docprep/synth.hpp"

namespace docprep::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> settings;
};

struct Io {
    std::string input;
    std::string output;
};

std::vector<std::uint8_t> read_input(const std::string& path)
{
    if (path == "-")
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    return read_file(path);
}

void write_output(const std::string& path, const std::vector<std::uint8_t>& bytes)
{
    if (path == "-") {
        std::cout.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        std::cout.flush();
        return;
    }
    write_file(path, bytes);
}

bool wants_pbm(const std::string& path)
{
    return fs::path(path).extension() == ".pbm";
}

// .pbm gets packed bits; anything else an 8-bit P5 with paper 255 and ink 0.
std::vector<std::uint8_t> encode_binary(const BinaryImage& image, const std::string& path)
{
    if (wants_pbm(path))
        return encode_pbm(image);
    RasterImage gray(image.width(), image.height(), 1, 8);
    auto src = image.data();
    auto dst = gray.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = src[i] ? 255 : 0;
    return encode_pnm(gray);
}

PipelineConfig build_config(const Common& common)
{
    PipelineConfig cfg;
    if (!common.config_path.empty()) {
        const auto bytes = read_file(common.config_path);
        cfg = load_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    }
    for (const auto& s : common.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + s + "'", s);
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* sub, Common& common)
{
    sub->add_option("--config", common.config_path, "Flat key = value config file");
    sub->add_option("--set", common.settings, "Override one config key (key=value), repeatable")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

void add_io(CLI::App* sub, Io& io)
{
    sub->add_option("input", io.input, "Input PNM file ('-' for stdin)")->required();
    sub->add_option("output", io.output, "Output file ('-' for stdout)")->required();
}

RasterImage load_rgb(const std::string& path)
{
    auto image = decode_pnm(read_input(path));
    if (image.depth() == 16)
        image = convert_depth(image, 8);
    return image;
}

std::string stem_of(const std::string& output)
{
    if (output == "-")
        return "stdout";
    auto p = fs::path(output);
    return (p.parent_path() / p.stem()).string();
}

} // namespace

int parse_and_dispatch(int argc, const char* const* argv)
{
    CLI::App app{"Document image preprocessing for OCR", "docprep"};
    app.require_subcommand(1);

    Common common;
    Io io;

    auto* enhance = app.add_subcommand("enhance", "CLAHE on the HSV value plane (RGB in, RGB out)");
    auto* adjust = app.add_subcommand("adjust", "Gain/bias brightness and contrast adjustment");
    auto* grayscale = app.add_subcommand("grayscale", "Luminance grayscale conversion");
    auto* sharpen = app.add_subcommand("sharpen", "Unsharp masking of a grayscale image");
    auto* binarize = app.add_subcommand("binarize", "Otsu global binarization");
    auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
    auto* synth = app.add_subcommand("synth", "Generate a synthetic degraded page");
    auto* eval = app.add_subcommand("eval", "Compare OCR accuracy on raw and processed images");

    for (auto* sub : {enhance, adjust, grayscale, sharpen, binarize, pipeline}) {
        add_io(sub, io);
        add_common(sub, common);
    }
    add_common(eval, common);

    std::optional<double> gain, bias;
    adjust->add_option("--gain", gain, "Fixed gain; disables the automatic search");
    adjust->add_option("--bias", bias, "Fixed bias; disables the automatic search");

    bool save_stages = false;
    std::string stage_stem;
    pipeline->add_flag("--save-stages", save_stages, "Write every intermediate artifact");
    pipeline->add_option("--stage-prefix", stage_stem, "Path stem for stage artifacts (default: output stem)");

    std::string spec_path, synth_out;
    std::uint64_t seed = 0;
    synth->add_option("--spec", spec_path, "Synthetic page spec (key = value)");
    synth->add_option("--seed", seed, "Random seed")->required();
    synth->add_option("--out", synth_out, "Output stem: writes <stem>.ppm, <stem>.truth.pbm, <stem>.txt")->required();

    std::string manifest, ocr_cmd, report_path = "-", workdir;
    int jobs = 1;
    double timeout = 120.0;
    eval->add_option("--manifest", manifest, "doc_id<TAB>image<TAB>truth per line")->required();
    eval->add_option("--ocr-cmd", ocr_cmd, "Engine command template with {input} and {output}");
    eval->add_option("--report", report_path, "Report destination ('-' for stdout)");
    eval->add_option("--jobs", jobs, "Documents evaluated in parallel")->check(CLI::PositiveNumber);
    eval->add_option("--timeout", timeout, "Per-invocation OCR timeout in seconds")->check(CLI::PositiveNumber);
    eval->add_option("--workdir", workdir, "Scratch directory (default: a fresh temporary directory)");

    if (argc > 1 && argv[1][0] != '-') {
        const std::string word = argv[1];
        const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
        if (std::none_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return s->get_name() == word; })) {
            std::cerr << "docprep: unknown subcommand '" << word << "'\nRun with --help for more information.\n";
            return input_error;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return input_error;
    }

    try {
        if (*synth) {
            SynthDocSpec spec;
            if (!spec_path.empty()) {
                const auto bytes = read_file(spec_path);
                spec = load_synth_spec(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
            }
            const auto doc = synth_document(spec, seed);
            write_file(synth_out + ".ppm", encode_pnm(doc.image));
            write_file(synth_out + ".truth.pbm", encode_pbm(doc.truth_mask));
            const auto text = doc.truth_text + "\n";
            write_file(synth_out + ".txt", std::vector<std::uint8_t>(text.begin(), text.end()));
            return ok;
        }

        auto cfg = build_config(common);

        if (*eval) {
            if (const char* env = std::getenv("OCR_CMD"); env && *env)
                ocr_cmd = env;
            if (ocr_cmd.empty())
                throw Error("eval: no OCR command (use --ocr-cmd or OCR_CMD)");
            OcrCommand cmd{ocr_cmd, timeout};
            cmd.validate();
            const auto entries = load_manifest(manifest);
            const bool temp = workdir.empty();
            const auto dir = temp ? fs::temp_directory_path() / ("docprep-eval-" + std::to_string(::getpid()))
                                  : fs::path(workdir);
            fs::create_directories(dir);
            std::vector<ComparisonRow> rows;
            try {
                rows = evaluate_manifest(entries, cmd, cfg, dir.string(), jobs);
            } catch (...) {
                if (temp)
                    fs::remove_all(dir);
                throw;
            }
            if (temp)
                fs::remove_all(dir);
            const auto report = emit_report(rows);
            write_output(report_path, std::vector<std::uint8_t>(report.begin(), report.end()));
            return ok;
        }

        if (*enhance) {
            write_output(io.output, encode_pnm(stage_equalize(load_rgb(io.input), cfg)));
        } else if (*adjust) {
            const auto image = load_rgb(io.input);
            if (gain || bias) {
                cfg.auto_gain_bias = false;
                if (gain)
                    cfg.gain_bias.gain = *gain;
                if (bias)
                    cfg.gain_bias.bias = *bias;
            }
            const auto gb = stage_choose_gain_bias(image, cfg);
            std::cerr << "adjust: gain " << gb.gain << " bias " << gb.bias
                      << (gb.ceiling_unreachable ? " (brightness ceiling unreachable)" : "") << "\n";
            write_output(io.output, encode_pnm(stage_adjust(image, gb)));
        } else if (*grayscale) {
            write_output(io.output, encode_pnm(stage_grayscale(load_rgb(io.input))));
        } else if (*sharpen) {
            write_output(io.output, encode_pnm(stage_sharpen(load_rgb(io.input), cfg)));
        } else if (*binarize) {
            write_output(io.output, encode_binary(stage_binarize(load_rgb(io.input), cfg), io.output));
        } else if (*pipeline) {
            cfg.save_stages = cfg.save_stages || save_stages;
            const auto out = run_pipeline(decode_pnm(read_input(io.input)), cfg);
            for (const auto& w : out.warnings)
                std::cerr << "warning: " << w << "\n";
            write_output(io.output, encode_binary(out.binary, io.output));
            if (cfg.save_stages)
                for (const auto& p : write_stage_artifacts(out, stage_stem.empty() ? stem_of(io.output) : stage_stem))
                    std::cerr << "wrote " << p << "\n";
        }
        return ok;
    } catch (const OcrError& e) {
        std::cerr << "docprep: " << e.what() << "\n";
        return ocr_failure;
    } catch (const std::exception& e) {
        std::cerr << "docprep: " << e.what() << "\n";
        return input_error;
    }
}

int parse_and_dispatch(const std::vector<std::string>& args)
{
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return parse_and_dispatch(static_cast<int>(argv.size()), argv.data());
}

} // namespace docprep::cli
