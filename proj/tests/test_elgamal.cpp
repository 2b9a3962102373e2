#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "medchain/elgamal.hpp"
#include "medchain/errors.hpp"
#include "medchain/sha256.hpp"

#include "support.hpp"

using namespace medchain;
using elgamal::CipherPair;
using elgamal::GroupParams;
using elgamal::PrivateKey;
using elgamal::PublicKey;

namespace {

// Reference modular arithmetic on machine words, independent of GMP.
std::uint64_t ref_powmod(std::uint64_t base, std::uint64_t exp,
                         std::uint64_t mod) {
    unsigned __int128 acc = 1, b = base % mod;
    while (exp) {
        if (exp & 1) acc = acc * b % mod;
        b = b * b % mod;
        exp >>= 1;
    }
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t ref_invmod(std::uint64_t value, std::uint64_t prime) {
    return ref_powmod(value, prime - 2, prime);  // Fermat, prime modulus
}

const GroupParams kGroup23{23, 5, 11};

}  // namespace

TEST_CASE("keygen reproduces the hand-worked examples") {
    PublicKey pub{kGroup23, 8};
    mpz_class h;
    mpz_powm(h.get_mpz_t(), kGroup23.g.get_mpz_t(), mpz_class(6).get_mpz_t(),
             kGroup23.p.get_mpz_t());
    CHECK(h == 8);  // 5^6 mod 23

    mpz_powm(h.get_mpz_t(), kGroup23.g.get_mpz_t(), mpz_class(1).get_mpz_t(),
             kGroup23.p.get_mpz_t());
    CHECK(h == 5);

    Rng rng(11);
    auto pair = elgamal::keygen(kGroup23, rng);
    mpz_class check;
    mpz_powm(check.get_mpz_t(), kGroup23.g.get_mpz_t(),
             pair.priv.a.get_mpz_t(), kGroup23.p.get_mpz_t());
    CHECK(check == pair.pub.h);
    CHECK(pair.priv.a >= 1);
    CHECK(pair.priv.a <= kGroup23.q - 1);
}

TEST_CASE("encrypt_chunk_with_k matches the worked example") {
    PublicKey pub{kGroup23, 8};
    auto c = elgamal::encrypt_chunk_with_k(10, pub, 3);
    CHECK(c.c1 == 10);  // 5^3 mod 23
    CHECK(c.c2 == 14);  // 10 * 8^3 mod 23

    SUBCASE("unit plaintext with k = 1 gives (g, h)") {
        auto unit = elgamal::encrypt_chunk_with_k(1, pub, 1);
        CHECK(unit.c1 == pub.params.g);
        CHECK(unit.c2 == pub.h);
    }
    SUBCASE("deterministic for identical inputs") {
        auto again = elgamal::encrypt_chunk_with_k(10, pub, 3);
        CHECK(again.c1 == c.c1);
        CHECK(again.c2 == c.c2);
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(elgamal::encrypt_chunk_with_k(0, pub, 3), Error);
        CHECK_THROWS_AS(elgamal::encrypt_chunk_with_k(23, pub, 3), Error);
        CHECK_THROWS_AS(elgamal::encrypt_chunk_with_k(10, pub, 0), Error);
        CHECK_THROWS_AS(elgamal::encrypt_chunk_with_k(10, pub, 11), Error);
    }
}

TEST_CASE("decrypt_chunk matches the worked example") {
    PrivateKey priv{kGroup23, 6};
    CHECK(elgamal::decrypt_chunk({10, 14}, priv) == 10);
    CHECK_THROWS_AS(elgamal::decrypt_chunk({0, 14}, priv), Error);
}

TEST_CASE("p=23 exhaustive round trip against the word-size reference") {
    for (std::uint64_t a = 1; a <= 10; ++a) {
        std::uint64_t h = ref_powmod(5, a, 23);
        PublicKey pub{kGroup23, mpz_class(static_cast<unsigned long>(h))};
        PrivateKey priv{kGroup23, mpz_class(static_cast<unsigned long>(a))};
        for (std::uint64_t m = 1; m <= 22; ++m) {
            for (std::uint64_t k = 1; k <= 10; ++k) {
                auto c = elgamal::encrypt_chunk_with_k(
                    mpz_class(static_cast<unsigned long>(m)), pub,
                    mpz_class(static_cast<unsigned long>(k)));
                // reference ciphertext
                std::uint64_t rc1 = ref_powmod(5, k, 23);
                std::uint64_t rc2 = m * ref_powmod(h, k, 23) % 23;
                CHECK(c.c1 == mpz_class(static_cast<unsigned long>(rc1)));
                CHECK(c.c2 == mpz_class(static_cast<unsigned long>(rc2)));
                // reference decryption of the library ciphertext
                std::uint64_t s = ref_powmod(rc1, a, 23);
                CHECK(rc2 * ref_invmod(s, 23) % 23 == m);
                CHECK(elgamal::decrypt_chunk(c, priv) ==
                      mpz_class(static_cast<unsigned long>(m)));
            }
        }
    }
}

TEST_CASE("p=467 round trip and ciphertext group membership") {
    GroupParams group{467, 4, 233};  // 4 = 2^2 lands in the order-q subgroup
    REQUIRE(elgamal::validate(group));
    Rng rng(99);
    auto pair = elgamal::keygen(group, rng);
    for (std::uint64_t m = 1; m <= 466; ++m) {
        auto c = elgamal::encrypt_chunk(
            mpz_class(static_cast<unsigned long>(m)), pair.pub, rng);
        CHECK(c.c1 >= 1);
        CHECK(c.c1 <= 466);
        CHECK(c.c2 >= 1);
        CHECK(c.c2 <= 466);
        CHECK(elgamal::decrypt_chunk(c, pair.priv) ==
              mpz_class(static_cast<unsigned long>(m)));
    }
}

TEST_CASE("fresh randomness produces distinct ciphertexts") {
    GroupParams group{467, 4, 233};
    Rng rng(7);
    auto pair = elgamal::keygen(group, rng);
    auto first = elgamal::encrypt_chunk(42, pair.pub, rng);
    auto second = elgamal::encrypt_chunk(42, pair.pub, rng);
    CHECK(first.c1 != second.c1);
    CHECK(elgamal::decrypt_chunk(first, pair.priv) == 42);
    CHECK(elgamal::decrypt_chunk(second, pair.priv) == 42);
}

TEST_CASE("generate_params yields a valid safe-prime group") {
    Rng rng(1);
    auto params = elgamal::generate_params(16, rng);
    CHECK(mpz_sizeinbase(params.p.get_mpz_t(), 2) == 16);
    CHECK(params.p == 2 * params.q + 1);
    CHECK(elgamal::validate(params));

    SUBCASE("deterministic under the seed") {
        Rng a(123), b(123);
        auto pa = elgamal::generate_params(48, a);
        auto pb = elgamal::generate_params(48, b);
        CHECK(pa.p == pb.p);
        CHECK(pa.g == pb.g);
        CHECK(pa.q == pb.q);
    }
    SUBCASE("bit_length below 16 is rejected") {
        Rng r(1);
        CHECK_THROWS_AS(elgamal::generate_params(8, r), Error);
    }
    SUBCASE("128-bit generation validates") {
        Rng r(5);
        auto p128 = elgamal::generate_params(128, r);
        CHECK(mpz_sizeinbase(p128.p.get_mpz_t(), 2) == 128);
        CHECK(elgamal::validate(p128));
    }
}

TEST_CASE("validate rejects a full-group generator") {
    // 5 generates all of Z*_23, not the order-11 subgroup.
    CHECK_FALSE(elgamal::validate(kGroup23));
    CHECK(elgamal::validate(GroupParams{23, 2, 11}));
}

TEST_CASE("key files round-trip and reject corruption") {
    testsupport::TempDir dir;
    Rng rng(21);
    auto params = elgamal::generate_params(128, rng);
    auto pair = elgamal::keygen(params, rng);

    elgamal::save_public_key(dir.file("k.pub"), pair.pub);
    elgamal::save_private_key(dir.file("k.priv"), pair);

    auto pub = elgamal::load_public_key(dir.file("k.pub"));
    CHECK(pub.params.p == params.p);
    CHECK(pub.params.g == params.g);
    CHECK(pub.params.q == params.q);
    CHECK(pub.h == pair.pub.h);

    auto loaded = elgamal::load_private_key(dir.file("k.priv"));
    CHECK(loaded.priv.a == pair.priv.a);
    CHECK(loaded.pub.h == pair.pub.h);

    SUBCASE("fingerprint is the SHA-256 of the public key file bytes") {
        std::string bytes = elgamal::serialize_public_key(pair.pub);
        CHECK(elgamal::key_fingerprint(pair.pub) ==
              hex_encode(sha256(bytes)));
    }
    SUBCASE("missing field") {
        std::ofstream out(dir.file("bad.pub"));
        out << "p=" << params.p.get_str() << "\ng=" << params.g.get_str()
            << "\n";
        out.close();
        CHECK_THROWS_AS(elgamal::load_public_key(dir.file("bad.pub")), Error);
    }
    SUBCASE("tampered h is rejected on private load") {
        std::ofstream out(dir.file("bad.priv"));
        mpz_class wrong_h = pair.pub.h + 1;
        out << "p=" << params.p.get_str() << "\ng=" << params.g.get_str()
            << "\nh=" << wrong_h.get_str()
            << "\na=" << pair.priv.a.get_str() << "\n";
        out.close();
        CHECK_THROWS_AS(elgamal::load_private_key(dir.file("bad.priv")),
                        Error);
    }
    SUBCASE("non safe prime p is rejected") {
        std::ofstream out(dir.file("weak.pub"));
        out << "p=25\ng=2\nh=3\n";
        out.close();
        CHECK_THROWS_AS(elgamal::load_public_key(dir.file("weak.pub")), Error);
    }
}
