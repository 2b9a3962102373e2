#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <gmpxx.h>

#include "medchain/emr.hpp"

namespace testsupport {

// Demo record used throughout: 19 bytes of text and a 3x3 color raster.
inline const char* kDemoText = "Patient Name: Alice";

inline const std::string kDemoTextDigits =
    "080097116105101110116032078097109101058032065108105099101";

inline const std::string kDemoImageDigits =
    "160010240166016186171017191139019239179029199139039239166016206123013183"
    "064064244";

inline medchain::emr::RasterImage demo_image() {
    medchain::emr::RasterImage image;
    image.width = 3;
    image.height = 3;
    image.rgb = {160, 10, 240, 166, 16, 186, 171, 17,  191,
                 139, 19, 239, 179, 29, 199, 139, 39,  239,
                 166, 16, 206, 123, 13, 183, 64,  64,  244};
    return image;
}

inline medchain::emr::EmrPayload demo_payload() {
    medchain::emr::EmrPayload payload;
    payload.text.assign(kDemoText, kDemoText + 19);
    payload.image = demo_image();
    return payload;
}

// Reference dummy count computed with integer arithmetic only:
// floor(N log_b x) = k  <=>  b^k <= x^N < b^(k+1). Independent of the
// library's logarithm route.
inline std::uint32_t reference_dummy_count(std::uint64_t b, std::uint64_t x) {
    constexpr unsigned long kScale = 10000;
    constexpr std::uint32_t kModulus = 100;
    mpz_class power_of_x;
    mpz_ui_pow_ui(power_of_x.get_mpz_t(), static_cast<unsigned long>(x),
                  kScale);
    std::size_t digits =
        mpz_sizeinbase(power_of_x.get_mpz_t(), static_cast<int>(b));
    mpz_class probe;
    mpz_ui_pow_ui(probe.get_mpz_t(), static_cast<unsigned long>(b),
                  static_cast<unsigned long>(digits - 1));
    std::uint64_t k = probe <= power_of_x ? digits - 1 : digits - 2;
    return static_cast<std::uint32_t>(k % kModulus);
}

// Scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("medchain-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const {
        return path_ / name;
    }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
