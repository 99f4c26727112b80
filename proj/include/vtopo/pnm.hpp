#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "vtopo/errors.hpp"
#include "vtopo/mask.hpp"

namespace vtopo {

enum class PnmFormat {
    P4, // packed 1-bit bitmap, MSB first, rows padded to whole bytes
    P5, // 8-bit graymap, maxval <= 255
};

namespace detail {

inline bool pnm_is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Skips whitespace and '#' comments (which run to end of line), then reads
// one unsigned decimal token.
inline int pnm_read_number(std::span<const std::uint8_t> bytes, std::size_t& pos,
                           const char* field) {
    for (;;) {
        while (pos < bytes.size() && pnm_is_space(bytes[pos])) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    if (pos >= bytes.size())
        throw TruncatedError(std::string("pnm: input ended before ") + field);
    if (bytes[pos] < '0' || bytes[pos] > '9')
        throw ParseError(std::string("pnm: expected digit for ") + field);
    long value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1'000'000'000L)
            throw ParseError(std::string("pnm: ") + field + " out of range");
        ++pos;
    }
    return static_cast<int>(value);
}

} // namespace detail

// Decodes a P4 bitmap or P5 graymap into a binary mask. P5 samples map to
// foreground when >= 128 (so the threshold sits mid-range for maxval 255).
// P4 set bits are foreground. Malformed headers raise ParseError; payloads
// shorter than the declared raster raise TruncatedError.
inline BinaryMask load_pnm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw ParseError("pnm: missing magic number");
    PnmFormat format;
    if (bytes[1] == '4')
        format = PnmFormat::P4;
    else if (bytes[1] == '5')
        format = PnmFormat::P5;
    else
        throw ParseError("pnm: unsupported magic 'P" +
                         std::string(1, static_cast<char>(bytes[1])) + "'");

    std::size_t pos = 2;
    const int width = detail::pnm_read_number(bytes, pos, "width");
    const int height = detail::pnm_read_number(bytes, pos, "height");
    if (width <= 0 || height <= 0)
        throw ParseError("pnm: dimensions must be positive");

    int maxval = 255;
    if (format == PnmFormat::P5) {
        maxval = detail::pnm_read_number(bytes, pos, "maxval");
        if (maxval <= 0)
            throw ParseError("pnm: maxval must be positive");
        if (maxval > 255)
            throw ParseError("pnm: maxval " + std::to_string(maxval) +
                             " not supported (two-byte samples)");
    }

    // Exactly one whitespace byte separates the header from the payload.
    if (pos >= bytes.size())
        throw TruncatedError("pnm: input ended before payload");
    if (!detail::pnm_is_space(bytes[pos]))
        throw ParseError("pnm: header not terminated by whitespace");
    ++pos;

    BinaryMask mask(width, height);
    if (format == PnmFormat::P5) {
        const std::size_t need = static_cast<std::size_t>(width) * height;
        if (bytes.size() - pos < need)
            throw TruncatedError("pnm: payload has " + std::to_string(bytes.size() - pos) +
                                 " bytes, raster needs " + std::to_string(need));
        for (std::size_t i = 0; i < need; ++i)
            mask.pixels[i] = bytes[pos + i] >= 128 ? 1 : 0;
    } else {
        const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
        const std::size_t need = row_bytes * height;
        if (bytes.size() - pos < need)
            throw TruncatedError("pnm: payload has " + std::to_string(bytes.size() - pos) +
                                 " bytes, raster needs " + std::to_string(need));
        for (int y = 0; y < height; ++y) {
            const std::uint8_t* row = bytes.data() + pos + static_cast<std::size_t>(y) * row_bytes;
            for (int x = 0; x < width; ++x) {
                const std::uint8_t byte = row[x >> 3];
                mask.at(x, y) = (byte >> (7 - (x & 7))) & 1;
            }
        }
    }
    return mask;
}

// Encodes a mask as P4 (packed bits, pad bits zero) or P5 (255/0, maxval
// 255). The encoding is canonical, so decode(encode(m)) == m and
// encode(decode(b)) reproduces b byte-for-byte for payloads this writer
// emits.
inline std::vector<std::uint8_t> save_pnm(const BinaryMask& mask, PnmFormat format) {
    std::string header;
    header += format == PnmFormat::P4 ? "P4\n" : "P5\n";
    header += std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n";
    if (format == PnmFormat::P5) header += "255\n";

    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (format == PnmFormat::P5) {
        out.reserve(out.size() + mask.size());
        for (std::uint8_t p : mask.pixels) out.push_back(p ? 255 : 0);
    } else {
        const std::size_t row_bytes = (static_cast<std::size_t>(mask.width) + 7) / 8;
        out.reserve(out.size() + row_bytes * mask.height);
        for (int y = 0; y < mask.height; ++y) {
            std::uint8_t byte = 0;
            for (int x = 0; x < mask.width; ++x) {
                byte = static_cast<std::uint8_t>(byte | (mask.at(x, y) << (7 - (x & 7))));
                if ((x & 7) == 7) {
                    out.push_back(byte);
                    byte = 0;
                }
            }
            if (mask.width & 7) out.push_back(byte);
        }
    }
    return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ParseError("cannot open file for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ParseError("short write: " + path.string());
}

inline BinaryMask load_mask_file(const std::filesystem::path& path) {
    return load_pnm(read_file_bytes(path));
}

// Format of the file at `path`, judged by its magic number alone.
inline PnmFormat peek_pnm_format(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {0, 0};
    if (!in || !in.read(magic, 2))
        throw ParseError("cannot read magic from: " + path.string());
    if (magic[0] == 'P' && magic[1] == '4') return PnmFormat::P4;
    if (magic[0] == 'P' && magic[1] == '5') return PnmFormat::P5;
    throw ParseError("unsupported magic in: " + path.string());
}

inline void save_mask_file(const std::filesystem::path& path, const BinaryMask& mask,
                           PnmFormat format) {
    const auto bytes = save_pnm(mask, format);
    write_file_bytes(path, bytes);
}

} // namespace vtopo
