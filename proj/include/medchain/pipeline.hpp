#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "medchain/dna.hpp"
#include "medchain/elgamal.hpp"
#include "medchain/emr.hpp"
#include "medchain/rng.hpp"

namespace medchain::pipeline {

inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::size_t kDefaultChunkWidth = 300;

/// Cleartext metadata required to invert the pipeline. Reveals sizes only.
struct Envelope {
    std::uint32_t version = kContainerVersion;
    std::size_t chunk_width = 0;
    std::size_t total_digit_count = 0;
    std::size_t text_byte_count = 0;
    std::optional<std::pair<std::size_t, std::size_t>> image_dims;
    std::size_t n_chunks = 0;
    dna::DnaParams dna;
    std::size_t cipher_component_bits = 0;
    std::string key_fingerprint;  // SHA-256 of public key file bytes, hex
};

/// Envelope plus the interleaved DNA payload (dummy bases included).
struct EncryptedEmr {
    Envelope envelope;
    std::string payload;
};

/// Full encryption walk: digits -> sentinel-prefixed chunks -> ElGamal ->
/// fixed-width bits -> DNA bases -> dummy interleave. The sentinel digit '1'
/// in front of each chunk keeps leading zeros, excludes the zero plaintext
/// and doubles as a wrong-key detector.
EncryptedEmr encrypt_emr(const emr::EmrPayload& payload,
                         const elgamal::PublicKey& key,
                         const dna::DnaParams& dna_params,
                         std::size_t chunk_width, Rng& rng);

/// Inverse walk. Verifies the key fingerprint and every chunk sentinel.
emr::EmrPayload decrypt_emr(const EncryptedEmr& enc,
                            const elgamal::PrivateKey& key);

/// Canonical container rendering: `key=value` header lines in fixed order,
/// a blank line, then one character per DNA base. Identical containers
/// serialize to identical bytes.
std::string serialize_container(const EncryptedEmr& enc);

/// Inverse of serialize_container; validates every envelope invariant and
/// the payload length law.
EncryptedEmr parse_container(std::string_view bytes);

/// Largest chunk width usable with the given key (sentinel included);
/// capped at kDefaultChunkWidth.
std::size_t default_chunk_width(const elgamal::PublicKey& key);

/// Header section only (fields and blank line); the chainstore envelope
/// transaction carries exactly these bytes.
std::string serialize_envelope(const Envelope& envelope);
Envelope parse_envelope(std::string_view bytes);

/// The per-chunk DNA sequences of a container, dummies removed. One block
/// transaction is created per entry.
std::vector<std::string> payload_chunks(const EncryptedEmr& enc);

/// Rebuilds a container from an envelope and its per-chunk sequences.
EncryptedEmr assemble(const Envelope& envelope,
                      const std::vector<std::string>& chunks);

}  // namespace medchain::pipeline
