#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace medchain::dna {

/// Parameters of the dynamic dummy-base schedule. The schedule is a pure
/// function of (b, x0, gap index), so both sides recompute it and nothing
/// about it is transmitted besides b and x0.
struct DnaParams {
    std::uint32_t b = 3;   // logarithm base
    std::uint64_t x0 = 10; // initial schedule integer

    static constexpr std::uint64_t kScale = 10000;   // N
    static constexpr std::uint32_t kModulus = 100;   // Q
};

enum class DummySide { First, Second };

/// Bit sequence as 0/1 bytes. Cipher components are rendered into this form
/// at a fixed width before transcoding.
using BitString = std::vector<std::uint8_t>;

/// Pairs of bits to bases: 00=A, 01=C, 10=G, 11=T. Bit count must be even.
std::string bits_to_dna(const BitString& bits);

/// Exact inverse of bits_to_dna; rejects symbols outside {A,C,G,T}.
BitString dna_to_bits(const std::string& seq);

/// Dummy count for one gap: R = log_b(x), S = floor(R * N) mod Q.
/// The logarithm is evaluated with far more than 30 significant decimal
/// digits, and values of R*N at an exactness boundary are resolved with
/// integer arithmetic, so the floor can never flip.
std::uint32_t dummy_count(const DnaParams& params, std::uint64_t x);

/// Donor chunk for one gap: the first chunk when S is even (w = (-1)^S
/// positive), otherwise the second.
DummySide pick_side(std::uint32_t s);

/// Joins equal-length chunks, inserting S_i dummy bases between chunk i and
/// chunk i+1, copied from the front of the donor chunk. Chunk length must be
/// at least DnaParams::kModulus so the donor prefix always exists.
std::string interleave(const std::vector<std::string>& chunks,
                       const DnaParams& params);

/// Splits an interleaved sequence back into n_chunks chunks of chunk_len
/// bases, discarding (and verifying) the dummy bases in every gap.
std::vector<std::string> deinterleave(const std::string& seq,
                                      std::size_t chunk_len,
                                      std::size_t n_chunks,
                                      const DnaParams& params);

}  // namespace medchain::dna
