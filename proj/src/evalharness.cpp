#include "docprep/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace docprep {

namespace fs = std::filesystem;

namespace {

// Invalid sequences decode byte by byte.
std::vector<char32_t> code_points(std::string_view s)
{
    std::vector<char32_t> out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        const auto b = static_cast<unsigned char>(s[i]);
        int len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
        bool ok = len > 0 && i + len <= s.size();
        char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
        for (int k = 1; ok && k < len; ++k) {
            const auto c = static_cast<unsigned char>(s[i + k]);
            if ((c >> 6) != 0x2)
                ok = false;
            cp = (cp << 6) | (c & 0x3F);
        }
        if (!ok) {
            out.push_back(b);
            ++i;
        } else {
            out.push_back(cp);
            i += len;
        }
    }
    return out;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string replace_all(std::string s, std::string_view from, const std::string& to)
{
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
    return s;
}

} // namespace

void OcrCommand::validate() const
{
    if (command_template.find("{input}") == std::string::npos ||
        command_template.find("{output}") == std::string::npos)
        throw Error("ocr command template must contain {input} and {output}");
    if (!(timeout_seconds > 0.0))
        throw Error("ocr timeout must be positive");
}

std::string normalize_text(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

std::size_t char_length(std::string_view s)
{
    return code_points(s).size();
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    auto x = code_points(a);
    auto y = code_points(b);
    if (x.size() < y.size())
        std::swap(x, y);
    // rolling row over the shorter string
    std::vector<std::size_t> row(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            const std::size_t above = row[j];
            row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + (x[i - 1] == y[j - 1] ? 0 : 1)});
            diagonal = above;
        }
    }
    return row[y.size()];
}

double accuracy(std::size_t n, std::size_t errors)
{
    if (n == 0)
        throw Error("accuracy: ground truth has no characters");
    return (static_cast<double>(n) - static_cast<double>(errors)) / static_cast<double>(n);
}

std::string format_percent(double fraction)
{
    const bool negative = fraction < 0.0;
    // hundredths of a percent, truncated; the epsilon absorbs representation error
    const auto units = static_cast<long long>(std::floor(std::abs(fraction) * 10000.0 + 1e-7));
    std::string digits = std::to_string(units / 100);
    const long long frac = units % 100;
    if (frac != 0) {
        digits += '.';
        digits += static_cast<char>('0' + frac / 10);
        if (frac % 10 != 0)
            digits += static_cast<char>('0' + frac % 10);
    }
    return (negative && units != 0 ? "-" : "") + digits + "%";
}

AccuracyReport score_text(const std::string& doc_id, std::string_view truth, std::string_view ocr_output)
{
    const auto t = normalize_text(truth);
    const auto o = normalize_text(ocr_output);
    AccuracyReport r;
    r.doc_id = doc_id;
    r.n = char_length(t);
    r.errors = edit_distance(t, o);
    r.accuracy = accuracy(r.n, r.errors);
    return r;
}

std::vector<std::string> split_command(std::string_view command_template)
{
    std::vector<std::string> args;
    std::string current;
    bool in_token = false;
    char quote = 0;
    for (char c : command_template) {
        if (quote) {
            if (c == quote)
                quote = 0;
            else
                current += c;
        } else if (c == '"' || c == '\'') {
            quote = c;
            in_token = true;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (in_token)
                args.push_back(std::move(current));
            current.clear();
            in_token = false;
        } else {
            current += c;
            in_token = true;
        }
    }
    if (quote)
        throw Error("ocr command template has an unterminated quote");
    if (in_token)
        args.push_back(std::move(current));
    if (args.empty())
        throw Error("ocr command template is empty");
    return args;
}

std::string run_ocr(const std::string& image_path, const OcrCommand& cmd, const std::string& workdir)
{
    cmd.validate();
    if (!fs::exists(image_path))
        throw Error("ocr input '" + image_path + "' does not exist");

    const fs::path output = fs::path(workdir) / (fs::path(image_path).filename().string() + ".ocr");
    std::error_code ec;
    fs::remove(output, ec);
    fs::remove(output.string() + ".txt", ec);

    std::vector<std::string> args;
    for (auto& a : split_command(cmd.command_template))
        args.push_back(replace_all(replace_all(a, "{input}", image_path), "{output}", output.string()));
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    argv.push_back(nullptr);

    const pid_t pid = fork();
    if (pid < 0)
        throw OcrError("ocr: fork failed");
    if (pid == 0) {
        setpgid(0, 0);
        // the engine's chatter goes to our stderr; stdout stays clean
        dup2(STDERR_FILENO, STDOUT_FILENO);
        execvp(argv[0], argv.data());
        _exit(127);
    }
    setpgid(pid, pid);

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(cmd.timeout_seconds);
    int status = 0;
    while (true) {
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid)
            break;
        if (r < 0)
            throw OcrError("ocr: waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            throw OcrTimeoutError("ocr: '" + args[0] + "' timed out after " +
                                  std::to_string(cmd.timeout_seconds) + " s");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (WIFSIGNALED(status))
        throw OcrProcessError("ocr: '" + args[0] + "' killed by signal " + std::to_string(WTERMSIG(status)),
                              128 + WTERMSIG(status));
    if (WIFEXITED(status) && WEXITSTATUS(status) != 0)
        throw OcrProcessError("ocr: '" + args[0] + "' exited with code " + std::to_string(WEXITSTATUS(status)),
                              WEXITSTATUS(status));

    if (fs::exists(output))
        return normalize_text(read_text(output));
    if (fs::exists(output.string() + ".txt"))
        return normalize_text(read_text(output.string() + ".txt"));
    throw OcrOutputMissingError("ocr: engine produced no output at '" + output.string() + "'");
}

ComparisonRow evaluate_document(const std::string& doc_id, const RasterImage& image, std::string_view truth,
                                const OcrCommand& cmd, const PipelineConfig& cfg, const std::string& workdir)
{
    fs::create_directories(workdir);
    const auto raw_path = (fs::path(workdir) / (doc_id + ".raw.pnm")).string();
    const auto proc_path = (fs::path(workdir) / (doc_id + ".proc.pbm")).string();
    write_file(raw_path, encode_pnm(image));
    write_file(proc_path, encode_pbm(run_pipeline(image, cfg).binary));

    ComparisonRow row;
    row.doc_id = doc_id;
    row.raw = score_text(doc_id, truth, run_ocr(raw_path, cmd, workdir));
    row.processed = score_text(doc_id, truth, run_ocr(proc_path, cmd, workdir));
    row.delta = row.processed.accuracy - row.raw.accuracy;
    return row;
}

std::vector<ManifestEntry> load_manifest(const std::string& path)
{
    const auto text = read_text(path);
    const auto base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path q(p);
        return q.is_absolute() ? q.string() : (base / q).string();
    };
    std::vector<ManifestEntry> entries;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t tab = line.find('\t'); tab != std::string::npos; tab = line.find('\t', start)) {
            fields.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        fields.push_back(line.substr(start));
        if (fields.size() != 3 || fields[0].empty())
            throw Error("manifest " + path + ": line " + std::to_string(line_no) +
                        ": expected doc_id<TAB>image_path<TAB>truth_path");
        entries.push_back({fields[0], resolve(fields[1]), resolve(fields[2])});
    }
    if (entries.empty())
        throw Error("manifest " + path + " lists no documents");
    return entries;
}

std::vector<ComparisonRow> evaluate_manifest(const std::vector<ManifestEntry>& entries, const OcrCommand& cmd,
                                             const PipelineConfig& cfg, const std::string& workdir, int workers)
{
    std::vector<ComparisonRow> rows(entries.size());
    std::vector<std::exception_ptr> failures(entries.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            try {
                const auto& e = entries[i];
                const auto image = decode_pnm(read_file(e.image_path));
                const auto truth = read_text(e.truth_path);
                rows[i] = evaluate_document(e.doc_id, image, truth, cmd, cfg,
                                            (fs::path(workdir) / ("doc" + std::to_string(i))).string());
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const int n = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(entries.size(), 1)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    for (auto& f : failures)
        if (f)
            std::rethrow_exception(f);
    return rows;
}

std::string emit_report(const std::vector<ComparisonRow>& rows)
{
    if (rows.empty())
        throw Error("emit_report: no rows");
    std::string out;
    double raw_sum = 0.0, proc_sum = 0.0, delta_sum = 0.0;
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["doc_id"] = r.doc_id;
        j["n"] = r.raw.n;
        j["raw_errors"] = r.raw.errors;
        j["raw_accuracy"] = r.raw.accuracy;
        j["proc_errors"] = r.processed.errors;
        j["proc_accuracy"] = r.processed.accuracy;
        j["delta"] = r.delta;
        out += j.dump() + "\n";
        raw_sum += r.raw.accuracy;
        proc_sum += r.processed.accuracy;
        delta_sum += r.delta;
    }
    const double count = static_cast<double>(rows.size());
    nlohmann::ordered_json agg;
    agg["documents"] = rows.size();
    agg["mean_raw_accuracy"] = raw_sum / count;
    agg["mean_proc_accuracy"] = proc_sum / count;
    agg["mean_delta"] = delta_sum / count;
    nlohmann::ordered_json wrapper;
    wrapper["aggregate"] = agg;
    out += wrapper.dump() + "\n\n";

    auto signed_percent = [](double d) { return (d > 0.0 ? "+" : "") + format_percent(d); };
    std::vector<std::vector<std::string>> table;
    table.push_back({"Document ID", "Chars", "Original Errors", "Original Accuracy", "Processed Errors",
                     "Processed Accuracy", "Delta"});
    for (const auto& r : rows)
        table.push_back({r.doc_id, std::to_string(r.raw.n), std::to_string(r.raw.errors),
                         format_percent(r.raw.accuracy), std::to_string(r.processed.errors),
                         format_percent(r.processed.accuracy), signed_percent(r.delta)});
    table.push_back({"Mean", "", "", format_percent(raw_sum / count), "", format_percent(proc_sum / count),
                     signed_percent(delta_sum / count)});

    std::vector<std::size_t> widths(table.front().size(), 0);
    for (const auto& row : table)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());
    for (const auto& row : table) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                line += "  ";
            // first column left-aligned, numbers right-aligned
            const std::string pad(widths[c] - row[c].size(), ' ');
            line += c == 0 ? row[c] + pad : pad + row[c];
        }
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out += line + "\n";
    }
    return out;
}

} // namespace docprep
