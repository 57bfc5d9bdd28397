#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "docprep/pipeline.hpp"
#include "docprep/raster.hpp"

namespace docprep {

/// External OCR engine invocation. The template is split into an argument
/// vector (whitespace separated, quotes group) and `{input}` / `{output}` are
/// replaced literally inside each argument; no shell is involved. The engine
/// may write either `{output}` itself or `{output}.txt`.
struct OcrCommand {
    std::string command_template;
    double timeout_seconds = 120.0;

    void validate() const;
};

class OcrError : public Error {
public:
    using Error::Error;
};

class OcrProcessError : public OcrError {
public:
    OcrProcessError(const std::string& message, int exit_code) : OcrError(message), exit_code_(exit_code) {}
    int exit_code() const { return exit_code_; }

private:
    int exit_code_;
};

class OcrTimeoutError : public OcrError {
public:
    using OcrError::OcrError;
};

class OcrOutputMissingError : public OcrError {
public:
    using OcrError::OcrError;
};

struct AccuracyReport {
    std::string doc_id;
    std::size_t n = 0;
    std::size_t errors = 0;
    double accuracy = 0.0;
};

struct ComparisonRow {
    std::string doc_id;
    AccuracyReport raw;
    AccuracyReport processed;
    double delta = 0.0; // processed.accuracy - raw.accuracy
};

struct ManifestEntry {
    std::string doc_id;
    std::string image_path;
    std::string truth_path;
};

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_text(std::string_view s);

/// Number of characters (UTF-8 code points).
std::size_t char_length(std::string_view s);

/// Unit-cost Levenshtein distance over UTF-8 code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// (n - errors) / n; negative when errors exceed n.
double accuracy(std::size_t n, std::size_t errors);

/// Percentage truncated (not rounded) to two decimals with trailing zeros
/// dropped: 0.83979 -> "83.97%", 1.0 -> "100%", 0.995 -> "99.5%".
std::string format_percent(double fraction);

AccuracyReport score_text(const std::string& doc_id, std::string_view truth, std::string_view ocr_output);

std::vector<std::string> split_command(std::string_view command_template);

/// Runs the engine on `image_path` in `workdir` and returns its normalized text.
std::string run_ocr(const std::string& image_path, const OcrCommand& cmd, const std::string& workdir);

/// OCR on the raw image and on the pipeline's binary output, both scored
/// against `truth`.
ComparisonRow evaluate_document(const std::string& doc_id, const RasterImage& image, std::string_view truth,
                                const OcrCommand& cmd, const PipelineConfig& cfg, const std::string& workdir);

/// `doc_id<TAB>image_path<TAB>truth_path` per line; relative paths resolve
/// against the manifest's directory. Blank lines and '#' lines are skipped.
std::vector<ManifestEntry> load_manifest(const std::string& path);

/// Evaluates every entry with up to `workers` documents in flight; rows come
/// back in manifest order. Each document gets its own directory under workdir.
std::vector<ComparisonRow> evaluate_manifest(const std::vector<ManifestEntry>& entries, const OcrCommand& cmd,
                                             const PipelineConfig& cfg, const std::string& workdir,
                                             int workers = 1);

/// One JSON object per row, an aggregate object, a blank line, then an
/// aligned text table with the same columns.
std::string emit_report(const std::vector<ComparisonRow>& rows);

} // namespace docprep
