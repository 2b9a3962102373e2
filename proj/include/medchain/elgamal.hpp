#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "medchain/rng.hpp"

namespace medchain::elgamal {

/// Safe-prime group: p = 2q + 1 with p, q prime, g a generator of the
/// order-q subgroup. generate_params() always produces this structure;
/// hand-built parameters (small test groups, full-group generators) are
/// accepted by the arithmetic but fail validate().
struct GroupParams {
    mpz_class p;  // prime modulus
    mpz_class g;  // generator, in [2, p-2]
    mpz_class q;  // subgroup order, (p-1)/2
};

struct PublicKey {
    GroupParams params;
    mpz_class h;  // g^a mod p
};

struct PrivateKey {
    GroupParams params;
    mpz_class a;  // in [1, q-1]
};

struct KeyPair {
    PublicKey pub;
    PrivateKey priv;
};

struct CipherPair {
    mpz_class c1;
    mpz_class c2;
};

inline constexpr int kMillerRabinRounds = 40;
inline constexpr unsigned kMinBitLength = 16;

/// Generate a safe-prime group of exactly `bit_length` bits. Deterministic
/// for a given rng state. bit_length >= 16 (small sizes are for tests).
GroupParams generate_params(unsigned bit_length, Rng& rng);

/// Structural check: p prime, p = 2q+1 with q prime, g of order q.
bool validate(const GroupParams& params);

/// a uniform in [1, q-1], h = g^a mod p.
KeyPair keygen(const GroupParams& params, Rng& rng);

/// ElGamal encryption of m in [1, p-1] with a fresh ephemeral k in [1, q-1]:
/// c1 = g^k mod p, c2 = m * h^k mod p.
CipherPair encrypt_chunk(const mpz_class& m, const PublicKey& key, Rng& rng);

/// Deterministic variant with a caller-supplied ephemeral k.
CipherPair encrypt_chunk_with_k(const mpz_class& m, const PublicKey& key,
                                const mpz_class& k);

/// m = c2 * (c1^a)^-1 mod p.
mpz_class decrypt_chunk(const CipherPair& c, const PrivateKey& key);

/// Canonical key file rendering: line-oriented `name=<decimal>` fields,
/// p/g/h for public keys plus a for private. The public rendering is also
/// the input of the container key fingerprint.
std::string serialize_public_key(const PublicKey& key);
std::string serialize_private_key(const KeyPair& pair);

void save_public_key(const std::filesystem::path& path, const PublicKey& key);
void save_private_key(const std::filesystem::path& path, const KeyPair& pair);

PublicKey load_public_key(const std::filesystem::path& path);
KeyPair load_private_key(const std::filesystem::path& path);

/// SHA-256 of the canonical public key file bytes, hex.
std::string key_fingerprint(const PublicKey& key);

}  // namespace medchain::elgamal
