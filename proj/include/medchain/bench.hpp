#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medchain/dna.hpp"
#include "medchain/elgamal.hpp"
#include "medchain/rng.hpp"

namespace medchain::bench {

/// One benchmark input: synthetic text bytes plus an optional synthetic
/// image, parsed from specs like "100K+200x200" or "4096".
struct SizeSpec {
    std::string label;
    std::size_t text_bytes = 0;
    std::optional<std::pair<std::size_t, std::size_t>> image_dims;
};

struct BenchRecord {
    std::string label;
    std::size_t plain_bytes = 0;
    std::size_t cipher_bytes = 0;
    double expansion_ratio = 0;  // cipher_bytes / plain_bytes
    double encrypt_ms = 0;
    double decrypt_ms = 0;
    double enc_dec_ratio = 0;    // encrypt_ms / decrypt_ms
    double block_create_ms = 0;  // append only; excludes encryption
};

inline constexpr std::size_t kPlainByteCap = 64u << 20;

/// Bases per plaintext byte with the default 1024-bit key and width-300
/// chunks, before dummy overhead: 1024 / 100.
inline constexpr double kAnalyticExpansion = 10.24;

SizeSpec parse_size_spec(const std::string& spec);

/// Runs encrypt / decrypt / block-create for one input, wall-clock, median
/// of `runs` (>= 3) measurements each. `scratch_dir` receives a throwaway
/// chain per call.
BenchRecord run_bench(const SizeSpec& spec, const elgamal::KeyPair& keys,
                      const dna::DnaParams& dna_params,
                      std::size_t chunk_width, Rng& rng,
                      const std::filesystem::path& scratch_dir,
                      unsigned runs = 3);

std::string csv_header();
std::string csv_row(const BenchRecord& record);

}  // namespace medchain::bench
