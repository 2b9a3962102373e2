#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace medchain::emr {

/// RGB raster, row-major, one byte per channel, pixel channels interleaved
/// (the in-memory layout matches a P6 raster).
struct RasterImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb;  // 3 * width * height bytes

    bool operator==(const RasterImage&) const = default;
};

/// The plain e-MR: text bytes plus an optional color image.
struct EmrPayload {
    std::vector<std::uint8_t> text;
    std::optional<RasterImage> image;

    bool operator==(const EmrPayload&) const = default;
};

/// Decimal digit rendering of a payload, plus the counts needed to invert it.
struct DigitStream {
    std::string digits;
    std::size_t text_byte_count = 0;
    std::optional<std::pair<std::size_t, std::size_t>> image_dims;
};

/// Fixed-width chunks. Padding zeros, if any, occupy the leftmost positions
/// of the leftmost chunk; total_digit_count is the pre-padding length.
struct ChunkSet {
    std::vector<std::string> chunks;
    std::size_t total_digit_count = 0;
    std::size_t chunk_width = 0;
};

/// Each byte as exactly three decimal digits, e.g. 'P' -> "080".
std::string text_to_digits(std::span<const std::uint8_t> text);

/// Pixels row-major, R then G then B per pixel, three digits per channel.
std::string image_to_digits(const RasterImage& image);

/// Text digits immediately followed by image digits.
DigitStream payload_to_digits(const EmrPayload& payload);

/// Right-aligned split into chunks of chunk_width digits; the leftmost chunk
/// is left-padded with '0'.
ChunkSet chunkify(const DigitStream& stream, std::size_t chunk_width);

/// Concatenates chunks and strips exactly the recorded pad count (never
/// greedy, so data digits that happen to be '0' survive).
std::string dechunkify(const ChunkSet& chunks);

/// Exact inverse of payload_to_digits.
EmrPayload digits_to_payload(const DigitStream& stream);

/// Portable pixmap I/O. Reading accepts binary P6 and ASCII P3 with maxval
/// 255; writing emits a canonical header so write(read(f)) is bit-stable.
RasterImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RasterImage& image,
               bool binary = true);

}  // namespace medchain::emr
