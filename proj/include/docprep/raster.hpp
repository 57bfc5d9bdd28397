#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace docprep {

/// Raised for malformed inputs: bad files, bad dimensions, out-of-range
/// parameters. Every module reports caller errors through this type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned pixel rectangle, (row, col) of the top-left corner.
struct Rect {
    int row = 0;
    int col = 0;
    int height = 0;
    int width = 0;
};

/// Row-major, channel-interleaved image with 1 or 3 channels at 8 or 16 bits.
/// Samples are stored widened to uint16 regardless of depth.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, int channels, int depth, std::uint16_t fill = 0);
    RasterImage(int width, int height, int channels, int depth, std::vector<std::uint16_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    int depth() const { return depth_; }
    std::uint32_t max_value() const { return (1u << depth_) - 1u; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }

    std::uint16_t at(int row, int col, int ch = 0) const { return data_[index(row, col, ch)]; }
    std::uint16_t& at(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }

    std::span<const std::uint16_t> data() const { return data_; }
    std::span<std::uint16_t> data() { return data_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t index(int row, int col, int ch) const
    {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
    }
    void validate() const;

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    int depth_ = 8;
    std::vector<std::uint16_t> data_;
};

/// One byte per pixel, values 0 or 1. In pipeline output 1 renders white.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height, std::uint8_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return data_.size(); }

    std::uint8_t at(int row, int col) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }
    std::uint8_t& at(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }

    std::span<const std::uint8_t> data() const { return data_; }
    std::span<std::uint8_t> data() { return data_; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

struct Histogram {
    std::vector<std::uint64_t> bins;
    std::uint64_t total = 0;
};

RasterImage decode_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pnm(const RasterImage& image);

// Raw PBM (P4). Bit 1 is black, so a BinaryImage value of 0 is written as 1.
BinaryImage decode_pbm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pbm(const BinaryImage& image);

/// Counts samples of a single-channel image. With bin_count unset there is one
/// bin per representable level; otherwise levels are spread evenly over
/// bin_count bins.
Histogram histogram(const RasterImage& image, std::optional<Rect> region = std::nullopt,
                    std::optional<int> bin_count = std::nullopt);

/// 8->16 scales by 257; 16->8 divides by 257 rounding half up.
RasterImage convert_depth(const RasterImage& image, int target_depth);

/// Extracts one channel as a single-channel image.
RasterImage extract_channel(const RasterImage& image, int channel);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

} // namespace docprep
