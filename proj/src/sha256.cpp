#include "medchain/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace medchain {

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                   nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256: digest computation failed");
    }
    return out;
}

Digest sha256(const std::string& data) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string hex_encode(std::span<const std::uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

}  // namespace medchain
