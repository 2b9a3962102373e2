#include "medchain/emr.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "medchain/errors.hpp"

namespace medchain::emr {

namespace {

void append_3_digits(std::string& out, unsigned value) {
    out.push_back(static_cast<char>('0' + value / 100));
    out.push_back(static_cast<char>('0' + value / 10 % 10));
    out.push_back(static_cast<char>('0' + value % 10));
}

void check_image(const RasterImage& image) {
    if (image.width == 0 || image.height == 0)
        throw Error(ErrorKind::Domain, "image: dimensions must be >= 1");
    if (image.rgb.size() != 3 * image.width * image.height)
        throw Error(ErrorKind::Domain,
                    "image: pixel buffer does not match dimensions");
}

}  // namespace

std::string text_to_digits(std::span<const std::uint8_t> text) {
    std::string out;
    out.reserve(3 * text.size());
    for (std::uint8_t b : text) append_3_digits(out, b);
    return out;
}

std::string image_to_digits(const RasterImage& image) {
    check_image(image);
    std::string out;
    out.reserve(3 * image.rgb.size());
    for (std::uint8_t channel : image.rgb) append_3_digits(out, channel);
    return out;
}

DigitStream payload_to_digits(const EmrPayload& payload) {
    DigitStream stream;
    stream.digits = text_to_digits(payload.text);
    stream.text_byte_count = payload.text.size();
    if (payload.image) {
        stream.digits += image_to_digits(*payload.image);
        stream.image_dims = {payload.image->width, payload.image->height};
    }
    return stream;
}

ChunkSet chunkify(const DigitStream& stream, std::size_t chunk_width) {
    if (chunk_width == 0)
        throw Error(ErrorKind::Parameter, "chunkify: chunk_width must be >= 1");
    if (stream.digits.empty())
        throw Error(ErrorKind::Domain, "chunkify: empty digit stream");

    std::size_t total = stream.digits.size();
    std::size_t n_chunks = (total + chunk_width - 1) / chunk_width;
    std::size_t pad = n_chunks * chunk_width - total;

    ChunkSet set;
    set.total_digit_count = total;
    set.chunk_width = chunk_width;
    set.chunks.reserve(n_chunks);

    std::string first(pad, '0');
    first += stream.digits.substr(0, chunk_width - pad);
    set.chunks.push_back(std::move(first));
    for (std::size_t pos = chunk_width - pad; pos < total; pos += chunk_width)
        set.chunks.push_back(stream.digits.substr(pos, chunk_width));
    return set;
}

std::string dechunkify(const ChunkSet& set) {
    if (set.chunks.empty() || set.chunk_width == 0)
        throw Error(ErrorKind::Domain, "dechunkify: empty chunk set");
    for (const auto& chunk : set.chunks) {
        if (chunk.size() != set.chunk_width)
            throw Error(ErrorKind::Corruption,
                        "dechunkify: chunk width mismatch");
    }
    std::size_t joined = set.chunks.size() * set.chunk_width;
    if (set.total_digit_count > joined ||
        joined - set.total_digit_count >= set.chunk_width)
        throw Error(ErrorKind::Corruption,
                    "dechunkify: total_digit_count inconsistent with chunks");
    std::size_t pad = joined - set.total_digit_count;

    std::string out;
    out.reserve(joined);
    for (const auto& chunk : set.chunks) out += chunk;
    for (std::size_t i = 0; i < pad; ++i) {
        if (out[i] != '0')
            throw Error(ErrorKind::Corruption,
                        "dechunkify: nonzero pad digit");
    }
    return out.substr(pad);
}

EmrPayload digits_to_payload(const DigitStream& stream) {
    std::size_t expect = 3 * stream.text_byte_count;
    if (stream.image_dims)
        expect += 9 * stream.image_dims->first * stream.image_dims->second;
    if (stream.digits.size() != expect)
        throw Error(ErrorKind::Corruption,
                    "digits: length does not match recorded counts");

    auto take_byte = [&](std::size_t group) -> std::uint8_t {
        unsigned value = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            char c = stream.digits[3 * group + i];
            if (c < '0' || c > '9')
                throw Error(ErrorKind::Corruption, "digits: non-digit character");
            value = value * 10 + static_cast<unsigned>(c - '0');
        }
        if (value > 255)
            throw Error(ErrorKind::Corruption,
                        "digits: three-digit group exceeds 255");
        return static_cast<std::uint8_t>(value);
    };

    EmrPayload payload;
    payload.text.reserve(stream.text_byte_count);
    std::size_t group = 0;
    for (std::size_t i = 0; i < stream.text_byte_count; ++i)
        payload.text.push_back(take_byte(group++));
    if (stream.image_dims) {
        RasterImage image;
        image.width = stream.image_dims->first;
        image.height = stream.image_dims->second;
        image.rgb.reserve(3 * image.width * image.height);
        for (std::size_t i = 0; i < 3 * image.width * image.height; ++i)
            image.rgb.push_back(take_byte(group++));
        payload.image = std::move(image);
    }
    return payload;
}

namespace {

// Skips whitespace and '#' comments between PPM header tokens.
std::string next_ppm_token(std::istream& in) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!token.empty()) return token;
            continue;
        }
        token.push_back(static_cast<char>(c));
    }
    return token;
}

std::size_t parse_dimension(const std::string& token, const char* what) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
        throw Error(ErrorKind::Corruption,
                    std::string("ppm: malformed ") + what);
    unsigned long long value = std::stoull(token);
    if (value == 0 || value > (1u << 20))
        throw Error(ErrorKind::Corruption,
                    std::string("ppm: unsupported ") + what);
    return static_cast<std::size_t>(value);
}

}  // namespace

RasterImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());

    std::string magic = next_ppm_token(in);
    if (magic != "P6" && magic != "P3")
        throw Error(ErrorKind::Corruption, "ppm: magic must be P6 or P3");

    RasterImage image;
    image.width = parse_dimension(next_ppm_token(in), "width");
    image.height = parse_dimension(next_ppm_token(in), "height");
    std::string maxval = next_ppm_token(in);
    if (maxval != "255")
        throw Error(ErrorKind::Corruption, "ppm: maxval must be 255");

    std::size_t n = 3 * image.width * image.height;
    image.rgb.resize(n);
    if (magic == "P6") {
        // The single whitespace byte after maxval was already consumed by
        // the tokenizer; the raster follows immediately.
        in.read(reinterpret_cast<char*>(image.rgb.data()),
                static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw Error(ErrorKind::Corruption, "ppm: truncated raster");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::string sample = next_ppm_token(in);
            if (sample.empty())
                throw Error(ErrorKind::Corruption, "ppm: truncated raster");
            if (sample.find_first_not_of("0123456789") != std::string::npos)
                throw Error(ErrorKind::Corruption, "ppm: malformed sample");
            unsigned long value = std::stoul(sample);
            if (value > 255)
                throw Error(ErrorKind::Corruption, "ppm: sample exceeds maxval");
            image.rgb[i] = static_cast<std::uint8_t>(value);
        }
    }
    return image;
}

void write_ppm(const std::filesystem::path& path, const RasterImage& image,
               bool binary) {
    check_image(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
    out << (binary ? "P6" : "P3") << '\n'
        << image.width << ' ' << image.height << '\n'
        << "255" << '\n';
    if (binary) {
        out.write(reinterpret_cast<const char*>(image.rgb.data()),
                  static_cast<std::streamsize>(image.rgb.size()));
    } else {
        for (std::size_t i = 0; i < image.rgb.size(); ++i) {
            out << static_cast<unsigned>(image.rgb[i]);
            out << ((i % 12 == 11) ? '\n' : ' ');
        }
        if (image.rgb.size() % 12 != 0) out << '\n';
    }
    if (!out.flush()) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

}  // namespace medchain::emr
