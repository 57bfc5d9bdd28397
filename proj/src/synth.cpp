#include "docprep/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include "docprep/sharpen.hpp"

namespace docprep {

namespace {

constexpr int cell_w = 6; // 5 columns + 1 spacing
constexpr int cell_h = 8; // 7 rows + 1 spacing

std::vector<std::string> pseudo_text(std::mt19937_64& rng, int columns, int rows)
{
    static constexpr std::string_view letters = "etaoinshrdlucmfwypvbgkqjxz";
    std::uniform_int_distribution<int> word_len(2, 8);
    std::geometric_distribution<int> letter_rank(0.18);
    std::bernoulli_distribution capital(0.08);
    std::vector<std::string> lines;
    for (int r = 0; r < rows; ++r) {
        std::string line;
        while (true) {
            const int len = word_len(rng);
            if (static_cast<int>(line.size()) + (line.empty() ? 0 : 1) + len > columns)
                break;
            if (!line.empty())
                line += ' ';
            for (int i = 0; i < len; ++i) {
                char c = letters[std::min<int>(letter_rank(rng), letters.size() - 1)];
                if (i == 0 && capital(rng))
                    c = static_cast<char>(c - 'a' + 'A');
                line += c;
            }
        }
        lines.push_back(line);
    }
    return lines;
}

std::uint16_t to_sample(double v)
{
    return static_cast<std::uint16_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

} // namespace

void SynthDocSpec::validate() const
{
    if (width <= 0 || height <= 0)
        throw Error("synth: page size must be positive");
    if (stroke < 1)
        throw Error("synth: stroke must be at least 1");
    if (margin < 0 || line_gap < 0)
        throw Error("synth: margin and line_gap must be nonnegative");
    if (!(gradient_strength >= 0.0 && gradient_strength < 1.0))
        throw Error("synth: gradient_strength must lie in [0, 1)");
    if (!(noise_sigma >= 0.0) || !(blur_radius >= 0.0))
        throw Error("synth: noise_sigma and blur_radius must be nonnegative");
    if (columns() < 1 || max_lines() < 1)
        throw Error("synth: page too small for a single glyph");
}

int SynthDocSpec::columns() const
{
    return (width - 2 * margin) / (cell_w * stroke);
}

int SynthDocSpec::max_lines() const
{
    const int pitch = cell_h * stroke + line_gap;
    return (height - 2 * margin + line_gap) / pitch;
}

SynthDocument synth_document(const SynthDocSpec& spec, std::uint64_t seed)
{
    spec.validate();
    std::mt19937_64 rng(seed);

    auto lines = spec.lines.empty() ? pseudo_text(rng, spec.columns(), spec.max_lines()) : spec.lines;
    if (static_cast<int>(lines.size()) > spec.max_lines())
        throw Error("synth: text does not fit page (" + std::to_string(lines.size()) + " lines, room for " +
                    std::to_string(spec.max_lines()) + ")");
    for (const auto& line : lines)
        if (static_cast<int>(line.size()) > spec.columns())
            throw Error("synth: text does not fit page (line of " + std::to_string(line.size()) +
                        " characters, room for " + std::to_string(spec.columns()) + ")");

    SynthDocument doc;
    doc.truth_mask = BinaryImage(spec.width, spec.height, 1);
    const int pitch = cell_h * spec.stroke + spec.line_gap;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int top = spec.margin + static_cast<int>(li) * pitch;
        for (std::size_t ci = 0; ci < lines[li].size(); ++ci) {
            const auto* cols = glyph_columns(lines[li][ci]);
            const int left = spec.margin + static_cast<int>(ci) * cell_w * spec.stroke;
            for (int gx = 0; gx < 5; ++gx)
                for (int gy = 0; gy < 7; ++gy) {
                    if (!((cols[gx] >> gy) & 1))
                        continue;
                    for (int dy = 0; dy < spec.stroke; ++dy)
                        for (int dx = 0; dx < spec.stroke; ++dx)
                            doc.truth_mask.at(top + gy * spec.stroke + dy, left + gx * spec.stroke + dx) = 0;
                }
        }
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i)
            doc.truth_text += '\n';
        doc.truth_text += lines[i];
    }

    // illumination: project onto the falloff direction, normalized over the page corners
    const double theta = spec.gradient_angle * std::numbers::pi / 180.0;
    const double ux = std::cos(theta), uy = std::sin(theta);
    auto project = [&](double x, double y) { return ux * x / spec.width + uy * y / spec.height; };
    const double corners[4] = {project(0, 0), project(spec.width, 0), project(0, spec.height),
                               project(spec.width, spec.height)};
    const double lo = *std::min_element(corners, corners + 4);
    const double hi = *std::max_element(corners, corners + 4);

    RasterImage image(spec.width, spec.height, 3, 8);
    const std::uint8_t paper[3] = {spec.paper.r, spec.paper.g, spec.paper.b};
    const std::uint8_t ink[3] = {spec.ink.r, spec.ink.g, spec.ink.b};
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const double t = hi > lo ? (project(x + 0.5, y + 0.5) - lo) / (hi - lo) : 0.0;
            const double light = 1.0 - spec.gradient_strength * t;
            const auto* colour = doc.truth_mask.at(y, x) ? paper : ink;
            for (int c = 0; c < 3; ++c)
                image.at(y, x, c) = to_sample(colour[c] * light);
        }

    if (spec.blur_radius > 0.0) {
        const int size = 2 * static_cast<int>(std::ceil(3.0 * spec.blur_radius)) + 1;
        const auto kernel = gaussian_kernel(spec.blur_radius, size);
        for (int c = 0; c < 3; ++c) {
            const auto blurred = convolve(extract_channel(image, c), kernel);
            for (int y = 0; y < spec.height; ++y)
                for (int x = 0; x < spec.width; ++x)
                    image.at(y, x, c) = blurred.at(y, x);
        }
    }

    if (spec.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (auto& s : image.data())
            s = to_sample(s + noise(rng));
    }

    doc.image = std::move(image);
    return doc;
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view v)
{
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw Error("synth spec: bad value for '" + std::string(key) + "': '" + std::string(v) + "'");
    return out;
}

RgbPixel parse_colour(std::string_view key, std::string_view v)
{
    int parts[3];
    for (int i = 0; i < 3; ++i) {
        const auto comma = v.find(',');
        if ((i < 2) == (comma == std::string_view::npos))
            throw Error("synth spec: '" + std::string(key) + "' must be r,g,b");
        parts[i] = parse_number<int>(key, trim(v.substr(0, comma)));
        if (parts[i] < 0 || parts[i] > 255)
            throw Error("synth spec: '" + std::string(key) + "' components must be in [0, 255]");
        v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
    }
    return {static_cast<std::uint8_t>(parts[0]), static_cast<std::uint8_t>(parts[1]),
            static_cast<std::uint8_t>(parts[2])};
}

} // namespace

SynthDocSpec load_synth_spec(std::string_view text)
{
    SynthDocSpec spec;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        auto raw = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        const auto stripped = trim(raw);
        if (stripped.empty() || stripped.front() == '#')
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string_view::npos)
            throw Error("synth spec: line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(stripped.substr(0, eq));
        const auto value = trim(stripped.substr(eq + 1));
        if (key == "width")
            spec.width = parse_number<int>(key, value);
        else if (key == "height")
            spec.height = parse_number<int>(key, value);
        else if (key == "stroke")
            spec.stroke = parse_number<int>(key, value);
        else if (key == "margin")
            spec.margin = parse_number<int>(key, value);
        else if (key == "line_gap")
            spec.line_gap = parse_number<int>(key, value);
        else if (key == "paper")
            spec.paper = parse_colour(key, value);
        else if (key == "ink")
            spec.ink = parse_colour(key, value);
        else if (key == "gradient_strength")
            spec.gradient_strength = parse_number<double>(key, value);
        else if (key == "gradient_angle")
            spec.gradient_angle = parse_number<double>(key, value);
        else if (key == "noise_sigma")
            spec.noise_sigma = parse_number<double>(key, value);
        else if (key == "blur_radius")
            spec.blur_radius = parse_number<double>(key, value);
        else if (key == "line")
            spec.lines.emplace_back(value);
        else
            throw Error("synth spec: line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    spec.validate();
    return spec;
}

} // namespace docprep
