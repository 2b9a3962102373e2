#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "medchain/emr.hpp"
#include "medchain/errors.hpp"

#include "support.hpp"

using namespace medchain;
using emr::ChunkSet;
using emr::DigitStream;
using emr::EmrPayload;
using emr::RasterImage;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

EmrPayload random_payload(std::mt19937& gen, bool allow_empty = false) {
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> text_len(allow_empty ? 0 : 1, 64);
    std::uniform_int_distribution<int> dim(1, 6);
    EmrPayload payload;
    int n = text_len(gen);
    for (int i = 0; i < n; ++i)
        payload.text.push_back(static_cast<std::uint8_t>(byte(gen)));
    if (gen() % 2 == 0 || payload.text.empty()) {
        RasterImage image;
        image.width = static_cast<std::size_t>(dim(gen));
        image.height = static_cast<std::size_t>(dim(gen));
        for (std::size_t i = 0; i < 3 * image.width * image.height; ++i)
            image.rgb.push_back(static_cast<std::uint8_t>(byte(gen)));
        payload.image = std::move(image);
    }
    return payload;
}

}  // namespace

TEST_CASE("text_to_digits renders each byte as three decimal digits") {
    std::vector<std::uint8_t> text(testsupport::kDemoText,
                                   testsupport::kDemoText + 19);
    CHECK(emr::text_to_digits(text) == testsupport::kDemoTextDigits);
    CHECK(emr::text_to_digits({}) == "");
    CHECK(emr::text_to_digits(std::vector<std::uint8_t>{0}) == "000");
    CHECK(emr::text_to_digits(std::vector<std::uint8_t>{255}) == "255");
}

TEST_CASE("image_to_digits interleaves channels per pixel, row-major") {
    RasterImage demo = testsupport::demo_image();
    std::string digits = emr::image_to_digits(demo);
    CHECK(digits == testsupport::kDemoImageDigits);
    CHECK(digits.substr(0, 9) == "160010240");

    RasterImage zero{1, 1, {0, 0, 0}};
    CHECK(emr::image_to_digits(zero) == "000000000");

    RasterImage two{2, 1, {1, 2, 3, 4, 5, 6}};
    CHECK(emr::image_to_digits(two) == "001002003004005006");

    RasterImage bad{2, 2, {1, 2, 3}};
    CHECK_THROWS_AS(emr::image_to_digits(bad), Error);
}

TEST_CASE("payload_to_digits appends image digits after text digits") {
    DigitStream stream = emr::payload_to_digits(testsupport::demo_payload());
    CHECK(stream.digits ==
          testsupport::kDemoTextDigits + testsupport::kDemoImageDigits);
    CHECK(stream.digits.size() == 138);
    CHECK(stream.text_byte_count == 19);
    REQUIRE(stream.image_dims.has_value());
    CHECK(stream.image_dims->first == 3);
    CHECK(stream.image_dims->second == 3);

    EmrPayload text_only;
    text_only.text = {'h', 'i'};
    CHECK(emr::payload_to_digits(text_only).digits == "104105");

    EmrPayload empty;
    CHECK(emr::payload_to_digits(empty).digits.empty());
}

TEST_CASE("chunkify pads the leftmost chunk only") {
    DigitStream small{"12345", 0, std::nullopt};
    ChunkSet set = emr::chunkify(small, 6);
    REQUIRE(set.chunks.size() == 1);
    CHECK(set.chunks[0] == "012345");
    CHECK(set.total_digit_count == 5);

    DigitStream exact{"123456", 0, std::nullopt};
    ChunkSet two = emr::chunkify(exact, 3);
    REQUIRE(two.chunks.size() == 2);
    CHECK(two.chunks[0] == "123");
    CHECK(two.chunks[1] == "456");

    // The 138-digit demo stream at width 66: 60 pad digits, three chunks.
    DigitStream demo = emr::payload_to_digits(testsupport::demo_payload());
    ChunkSet chunks = emr::chunkify(demo, 66);
    REQUIRE(chunks.chunks.size() == 3);
    CHECK(chunks.chunks[0].substr(0, 60) == std::string(60, '0'));
    CHECK(chunks.chunks[0].substr(60) == demo.digits.substr(0, 6));

    DigitStream empty{"", 0, std::nullopt};
    CHECK_THROWS_AS(emr::chunkify(empty, 5), Error);
}

TEST_CASE("dechunkify strips exactly the recorded pad count") {
    ChunkSet set{{"012345"}, 5, 6};
    CHECK(emr::dechunkify(set) == "12345");

    // Data digits that happen to be '0' survive: 'P' encodes to "080...".
    DigitStream demo = emr::payload_to_digits(testsupport::demo_payload());
    ChunkSet chunks = emr::chunkify(demo, 66);
    std::string digits = emr::dechunkify(chunks);
    CHECK(digits == demo.digits);
    CHECK(digits.substr(0, 9) == "080097116");

    SUBCASE("nonzero pad digit is corruption") {
        ChunkSet bad{{"912345"}, 5, 6};
        CHECK_THROWS_AS(emr::dechunkify(bad), Error);
    }
    SUBCASE("inconsistent total_digit_count is corruption") {
        ChunkSet bad{{"012345"}, 12, 6};
        CHECK_THROWS_AS(emr::dechunkify(bad), Error);
    }
}

TEST_CASE("dechunkify inverts chunkify for random streams") {
    std::mt19937 gen(2024);
    std::uniform_int_distribution<int> digit('0', '9');
    std::uniform_int_distribution<int> len(1, 400);
    std::uniform_int_distribution<int> width(1, 50);
    for (int round = 0; round < 200; ++round) {
        DigitStream stream;
        int n = len(gen);
        for (int i = 0; i < n; ++i)
            stream.digits.push_back(static_cast<char>(digit(gen)));
        ChunkSet set = emr::chunkify(stream, static_cast<std::size_t>(width(gen)));
        for (const auto& chunk : set.chunks)
            CHECK(chunk.size() == set.chunk_width);
        std::size_t pad = set.chunks.size() * set.chunk_width -
                          set.total_digit_count;
        CHECK(pad < set.chunk_width);
        CHECK(emr::dechunkify(set) == stream.digits);
    }
}

TEST_CASE("digits_to_payload recovers the demo record") {
    DigitStream stream{testsupport::kDemoTextDigits, 19, std::nullopt};
    EmrPayload payload = emr::digits_to_payload(stream);
    CHECK(std::string(payload.text.begin(), payload.text.end()) ==
          testsupport::kDemoText);

    SUBCASE("a three-digit group above 255 is corruption") {
        DigitStream bad{"256", 1, std::nullopt};
        CHECK_THROWS_AS(emr::digits_to_payload(bad), Error);
    }
    SUBCASE("length mismatch is corruption") {
        DigitStream bad{"0800", 1, std::nullopt};
        CHECK_THROWS_AS(emr::digits_to_payload(bad), Error);
    }
}

TEST_CASE("digits_to_payload inverts payload_to_digits") {
    std::mt19937 gen(77);
    for (int round = 0; round < 200; ++round) {
        EmrPayload payload = random_payload(gen, true);
        DigitStream stream = emr::payload_to_digits(payload);
        std::size_t pixels =
            payload.image ? payload.image->width * payload.image->height : 0;
        CHECK(stream.digits.size() == 3 * payload.text.size() + 9 * pixels);
        if (stream.digits.empty()) continue;
        CHECK(emr::digits_to_payload(stream) == payload);
    }
}

TEST_CASE("ppm round trips in both variants") {
    testsupport::TempDir dir;
    RasterImage demo = testsupport::demo_image();

    emr::write_ppm(dir.file("img.ppm"), demo, true);
    CHECK(emr::read_ppm(dir.file("img.ppm")) == demo);

    emr::write_ppm(dir.file("img_ascii.ppm"), demo, false);
    CHECK(emr::read_ppm(dir.file("img_ascii.ppm")) == demo);

    SUBCASE("canonical P6 bytes are stable under read/write") {
        RasterImage loaded = emr::read_ppm(dir.file("img.ppm"));
        emr::write_ppm(dir.file("img2.ppm"), loaded, true);
        CHECK(slurp(dir.file("img.ppm")) == slurp(dir.file("img2.ppm")));
    }
    SUBCASE("canonical P3 bytes are stable under read/write") {
        RasterImage loaded = emr::read_ppm(dir.file("img_ascii.ppm"));
        emr::write_ppm(dir.file("img_ascii2.ppm"), loaded, false);
        CHECK(slurp(dir.file("img_ascii.ppm")) ==
              slurp(dir.file("img_ascii2.ppm")));
    }
    SUBCASE("headers may carry comments and extra whitespace") {
        std::ofstream out(dir.file("weird.ppm"), std::ios::binary);
        out << "P3 # ascii pixmap\n# comment line\n  2 1\n255\n1 2 3\n4 5 6\n";
        out.close();
        RasterImage loaded = emr::read_ppm(dir.file("weird.ppm"));
        CHECK(loaded == RasterImage{2, 1, {1, 2, 3, 4, 5, 6}});
    }
    SUBCASE("truncated raster is corruption") {
        std::ofstream out(dir.file("short.ppm"), std::ios::binary);
        out << "P6\n2 2\n255\nabc";
        out.close();
        CHECK_THROWS_AS(emr::read_ppm(dir.file("short.ppm")), Error);
    }
    SUBCASE("unsupported maxval is rejected") {
        std::ofstream out(dir.file("deep.ppm"), std::ios::binary);
        out << "P6\n1 1\n65535\nxxxxxx";
        out.close();
        CHECK_THROWS_AS(emr::read_ppm(dir.file("deep.ppm")), Error);
    }
    SUBCASE("wrong magic is rejected") {
        std::ofstream out(dir.file("gray.ppm"), std::ios::binary);
        out << "P5\n1 1\n255\nx";
        out.close();
        CHECK_THROWS_AS(emr::read_ppm(dir.file("gray.ppm")), Error);
    }
}
