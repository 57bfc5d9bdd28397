#include "docprep/raster.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <limits>

namespace docprep {

RasterImage::RasterImage(int width, int height, int channels, int depth, std::uint16_t fill)
    : width_(width), height_(height), channels_(channels), depth_(depth)
{
    validate();
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    if (fill > max_value())
        throw Error("fill value exceeds depth range");
}

RasterImage::RasterImage(int width, int height, int channels, int depth,
                         std::vector<std::uint16_t> data)
    : width_(width), height_(height), channels_(channels), depth_(depth), data_(std::move(data))
{
    validate();
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw Error("sample buffer length does not match dimensions");
    if (depth_ == 8) {
        for (auto v : data_)
            if (v > 255)
                throw Error("sample exceeds 8-bit range");
    }
}

void RasterImage::validate() const
{
    if (width_ <= 0 || height_ <= 0)
        throw Error("image dimensions must be positive");
    if (channels_ != 1 && channels_ != 3)
        throw Error("image must have 1 or 3 channels");
    if (depth_ != 8 && depth_ != 16)
        throw Error("image depth must be 8 or 16");
}

BinaryImage::BinaryImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height)
{
    if (width <= 0 || height <= 0)
        throw Error("image dimensions must be positive");
    if (fill > 1)
        throw Error("binary fill must be 0 or 1");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string magic()
    {
        if (bytes_.size() < 2)
            throw Error("pnm: missing magic number");
        pos_ = 2;
        return {static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
    }

    // Whitespace and '#' comments separate header tokens; at least one
    // whitespace byte is required before every token.
    std::uint64_t number(const char* what)
    {
        bool separated = false;
        while (pos_ < bytes_.size()) {
            auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
                separated = true;
            } else if (std::isspace(c)) {
                ++pos_;
                separated = true;
            } else {
                break;
            }
        }
        if (!separated)
            throw Error(std::string("pnm: missing separator before ") + what);
        std::uint64_t value = 0;
        std::size_t digits = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > std::numeric_limits<std::uint32_t>::max())
                throw Error(std::string("pnm: ") + what + " too large");
            ++pos_;
            ++digits;
        }
        if (digits == 0)
            throw Error(std::string("pnm: malformed ") + what);
        return value;
    }

    // Exactly one whitespace byte terminates the header.
    std::size_t body_offset()
    {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw Error("pnm: header not terminated by whitespace");
        return pos_ + 1;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::string header(const char* magic, int width, int height, std::optional<std::uint32_t> maxval)
{
    std::string h = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n";
    if (maxval)
        h += std::to_string(*maxval) + "\n";
    return h;
}

} // namespace

RasterImage decode_pnm(std::span<const std::uint8_t> bytes)
{
    HeaderReader reader(bytes);
    auto magic = reader.magic();
    int channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw Error("pnm: unsupported magic '" + magic + "'");

    auto width = reader.number("width");
    auto height = reader.number("height");
    auto maxval = reader.number("maxval");
    if (width == 0 || height == 0)
        throw Error("pnm: zero dimensions");
    if (maxval != 255 && maxval != 65535)
        throw Error("pnm: maxval must be 255 or 65535, got " + std::to_string(maxval));
    const int depth = maxval == 255 ? 8 : 16;
    const std::size_t offset = reader.body_offset();

    const std::size_t samples = static_cast<std::size_t>(width) * height * channels;
    const std::size_t bytes_per_sample = depth / 8;
    const std::size_t body = bytes.size() - offset;
    if (body < samples * bytes_per_sample)
        throw Error("pnm: truncated body, expected " + std::to_string(samples * bytes_per_sample) +
                    " bytes, got " + std::to_string(body));
    if (body > samples * bytes_per_sample)
        throw Error("pnm: trailing bytes after body");

    std::vector<std::uint16_t> data(samples);
    const auto* p = bytes.data() + offset;
    if (depth == 8) {
        for (std::size_t i = 0; i < samples; ++i)
            data[i] = p[i];
    } else {
        for (std::size_t i = 0; i < samples; ++i)
            data[i] = static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
    }
    return RasterImage(static_cast<int>(width), static_cast<int>(height), channels, depth, std::move(data));
}

std::vector<std::uint8_t> encode_pnm(const RasterImage& image)
{
    if (image.empty())
        throw Error("pnm: cannot encode empty image");
    auto h = header(image.channels() == 1 ? "P5" : "P6", image.width(), image.height(), image.max_value());
    std::vector<std::uint8_t> out(h.begin(), h.end());
    auto samples = image.data();
    if (image.depth() == 8) {
        out.reserve(out.size() + samples.size());
        for (auto v : samples)
            out.push_back(static_cast<std::uint8_t>(v));
    } else {
        out.reserve(out.size() + 2 * samples.size());
        for (auto v : samples) {
            out.push_back(static_cast<std::uint8_t>(v >> 8));
            out.push_back(static_cast<std::uint8_t>(v & 0xff));
        }
    }
    return out;
}

BinaryImage decode_pbm(std::span<const std::uint8_t> bytes)
{
    HeaderReader reader(bytes);
    if (reader.magic() != "P4")
        throw Error("pbm: expected magic P4");
    auto width = reader.number("width");
    auto height = reader.number("height");
    if (width == 0 || height == 0)
        throw Error("pbm: zero dimensions");
    const std::size_t offset = reader.body_offset();
    const std::size_t stride = (width + 7) / 8;
    if (bytes.size() - offset != stride * height)
        throw Error("pbm: body length does not match dimensions");

    BinaryImage image(static_cast<int>(width), static_cast<int>(height));
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) {
            const bool black = (bytes[offset + r * stride + c / 8] >> (7 - c % 8)) & 1;
            image.at(static_cast<int>(r), static_cast<int>(c)) = black ? 0 : 1;
        }
    return image;
}

std::vector<std::uint8_t> encode_pbm(const BinaryImage& image)
{
    if (image.pixel_count() == 0)
        throw Error("pbm: cannot encode empty image");
    auto h = header("P4", image.width(), image.height(), std::nullopt);
    std::vector<std::uint8_t> out(h.begin(), h.end());
    const std::size_t stride = (image.width() + 7) / 8;
    const std::size_t offset = out.size();
    out.resize(offset + stride * image.height(), 0);
    for (int r = 0; r < image.height(); ++r)
        for (int c = 0; c < image.width(); ++c)
            if (image.at(r, c) == 0)
                out[offset + r * stride + c / 8] |= static_cast<std::uint8_t>(0x80 >> (c % 8));
    return out;
}

Histogram histogram(const RasterImage& image, std::optional<Rect> region, std::optional<int> bin_count)
{
    if (image.channels() != 1)
        throw Error("histogram: image must be single-channel");
    Rect r = region.value_or(Rect{0, 0, image.height(), image.width()});
    if (r.row < 0 || r.col < 0 || r.height <= 0 || r.width <= 0 ||
        r.row + r.height > image.height() || r.col + r.width > image.width())
        throw Error("histogram: region out of bounds");

    const std::uint64_t levels = std::uint64_t{1} << image.depth();
    const std::uint64_t bins = bin_count ? static_cast<std::uint64_t>(*bin_count) : levels;
    if (bins < 1)
        throw Error("histogram: bin count must be positive");

    Histogram h;
    h.bins.assign(bins, 0);
    for (int row = r.row; row < r.row + r.height; ++row)
        for (int col = r.col; col < r.col + r.width; ++col) {
            const std::uint64_t v = image.at(row, col);
            ++h.bins[bins == levels ? v : v * bins / levels];
        }
    h.total = static_cast<std::uint64_t>(r.height) * r.width;
    return h;
}

RasterImage convert_depth(const RasterImage& image, int target_depth)
{
    if (target_depth != 8 && target_depth != 16)
        throw Error("convert_depth: target depth must be 8 or 16");
    if (image.depth() == target_depth)
        return image;
    std::vector<std::uint16_t> out(image.data().begin(), image.data().end());
    if (target_depth == 16) {
        for (auto& v : out)
            v = static_cast<std::uint16_t>(v * 257u);
    } else {
        for (auto& v : out)
            v = static_cast<std::uint16_t>((2u * v + 257u) / 514u);
    }
    return RasterImage(image.width(), image.height(), image.channels(), target_depth, std::move(out));
}

RasterImage extract_channel(const RasterImage& image, int channel)
{
    if (channel < 0 || channel >= image.channels())
        throw Error("extract_channel: channel out of range");
    RasterImage out(image.width(), image.height(), 1, image.depth());
    auto src = image.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = src[i * image.channels() + channel];
    return out;
}

std::vector<std::uint8_t> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("write failed for '" + path + "'");
}

} // namespace docprep
