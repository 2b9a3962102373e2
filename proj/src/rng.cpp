#include "medchain/rng.hpp"

#include "medchain/errors.hpp"

namespace medchain {

mpz_class Rng::random_bits(unsigned bits) {
    mpz_class out = 0;
    unsigned produced = 0;
    while (produced < bits) {
        unsigned take = std::min(64u, bits - produced);
        std::uint64_t word = next_u64();
        if (take < 64) word >>= (64 - take);
        mpz_class chunk(static_cast<unsigned long>(word >> 32));
        chunk <<= 32;
        chunk += static_cast<unsigned long>(word & 0xffffffffULL);
        out <<= take;
        out += chunk;
        produced += take;
    }
    return out;
}

mpz_class Rng::below(const mpz_class& bound) {
    if (bound <= 0)
        throw Error(ErrorKind::Parameter, "rng: bound must be positive");
    size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    while (true) {
        mpz_class candidate = random_bits(static_cast<unsigned>(bits));
        if (candidate < bound) return candidate;
    }
}

mpz_class Rng::between(const mpz_class& lo, const mpz_class& hi) {
    if (lo > hi)
        throw Error(ErrorKind::Parameter, "rng: empty range");
    return lo + below(hi - lo + 1);
}

void Rng::fill_bytes(std::span<std::uint8_t> out) {
    size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = next_u64();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word >> (56 - 8 * b));
        }
    }
}

}  // namespace medchain
