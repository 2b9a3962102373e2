#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <gmpxx.h>

namespace medchain {

/// Seedable randomness stream. Built on std::mt19937_64 so that a given
/// seed reproduces byte-identical output on every platform; all randomized
/// operations in the library draw from one of these.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Fresh stream with a non-deterministic seed.
    static Rng from_entropy() {
        std::random_device rd;
        std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        return Rng(seed);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer with exactly `bits` random bits (value < 2^bits).
    mpz_class random_bits(unsigned bits);

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling.
    mpz_class below(const mpz_class& bound);

    /// Uniform integer in [lo, hi], lo <= hi.
    mpz_class between(const mpz_class& lo, const mpz_class& hi);

    void fill_bytes(std::span<std::uint8_t> out);

private:
    std::mt19937_64 engine_;
};

}  // namespace medchain
