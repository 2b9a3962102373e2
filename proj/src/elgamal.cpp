#include "medchain/elgamal.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "medchain/errors.hpp"
#include "medchain/sha256.hpp"

namespace medchain::elgamal {

namespace {

mpz_class powm(const mpz_class& base, const mpz_class& exp,
               const mpz_class& mod) {
    mpz_class out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(),
             mod.get_mpz_t());
    return out;
}

bool is_prime(const mpz_class& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), kMillerRabinRounds) > 0;
}

// Small primes used to sieve candidates before the expensive tests.
const std::vector<unsigned long>& sieve_primes() {
    static const std::vector<unsigned long> primes = [] {
        std::vector<unsigned long> out;
        std::vector<bool> composite(10000, false);
        for (unsigned long i = 2; i < composite.size(); ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (unsigned long j = i * i; j < composite.size(); j += i)
                composite[j] = true;
        }
        return out;
    }();
    return primes;
}

// Rejects candidates where q or p = 2q+1 has a small factor. A candidate
// equal to the small prime itself is kept (relevant for 16-bit groups).
bool survives_sieve(const mpz_class& q, const mpz_class& p) {
    for (unsigned long r : sieve_primes()) {
        if (mpz_fdiv_ui(q.get_mpz_t(), r) == 0 && mpz_cmp_ui(q.get_mpz_t(), r) != 0)
            return false;
        if (mpz_fdiv_ui(p.get_mpz_t(), r) == 0 && mpz_cmp_ui(p.get_mpz_t(), r) != 0)
            return false;
    }
    return true;
}

// Smallest c >= 2 that lands in the order-q subgroup. For a safe prime the
// subgroup is the quadratic residues, so c = 4 bounds the search.
mpz_class find_generator(const mpz_class& p, const mpz_class& q) {
    for (mpz_class c = 2;; ++c) {
        if (powm(c, q, p) == 1) return c;
    }
}

}  // namespace

GroupParams generate_params(unsigned bit_length, Rng& rng) {
    if (bit_length < kMinBitLength)
        throw Error(ErrorKind::Parameter,
                    "elgamal: bit_length must be at least 16");
    while (true) {
        // q gets bit_length-1 bits with the top bit set, so p = 2q+1 has
        // exactly bit_length bits.
        mpz_class q = rng.random_bits(bit_length - 1);
        mpz_setbit(q.get_mpz_t(), bit_length - 2);
        mpz_setbit(q.get_mpz_t(), 0);
        mpz_class p = 2 * q + 1;
        if (!survives_sieve(q, p)) continue;
        if (!is_prime(q) || !is_prime(p)) continue;
        return GroupParams{p, find_generator(p, q), q};
    }
}

bool validate(const GroupParams& params) {
    if (params.p < 7 || !is_prime(params.p)) return false;
    if (params.q * 2 + 1 != params.p || !is_prime(params.q)) return false;
    if (params.g < 2 || params.g > params.p - 2) return false;
    return powm(params.g, params.q, params.p) == 1;
}

KeyPair keygen(const GroupParams& params, Rng& rng) {
    mpz_class a = rng.between(1, params.q - 1);
    mpz_class h = powm(params.g, a, params.p);
    return KeyPair{PublicKey{params, h}, PrivateKey{params, a}};
}

CipherPair encrypt_chunk(const mpz_class& m, const PublicKey& key, Rng& rng) {
    mpz_class k = rng.between(1, key.params.q - 1);
    return encrypt_chunk_with_k(m, key, k);
}

CipherPair encrypt_chunk_with_k(const mpz_class& m, const PublicKey& key,
                                const mpz_class& k) {
    if (m < 1 || m >= key.params.p)
        throw Error(ErrorKind::Domain,
                    "elgamal: plaintext outside [1, p-1]");
    if (k < 1 || k >= key.params.q)
        throw Error(ErrorKind::Domain,
                    "elgamal: ephemeral k outside [1, q-1]");
    CipherPair out;
    out.c1 = powm(key.params.g, k, key.params.p);
    out.c2 = powm(key.h, k, key.params.p) * m % key.params.p;
    return out;
}

mpz_class decrypt_chunk(const CipherPair& c, const PrivateKey& key) {
    if (c.c1 < 1 || c.c1 >= key.params.p || c.c2 < 1 || c.c2 >= key.params.p)
        throw Error(ErrorKind::Domain,
                    "elgamal: ciphertext component outside [1, p-1]");
    mpz_class s = powm(c.c1, key.a, key.params.p);
    mpz_class s_inv;
    if (mpz_invert(s_inv.get_mpz_t(), s.get_mpz_t(), key.params.p.get_mpz_t()) == 0)
        throw Error(ErrorKind::Domain, "elgamal: shared secret not invertible");
    return c.c2 * s_inv % key.params.p;
}

std::string serialize_public_key(const PublicKey& key) {
    std::ostringstream out;
    out << "p=" << key.params.p.get_str() << '\n'
        << "g=" << key.params.g.get_str() << '\n'
        << "h=" << key.h.get_str() << '\n';
    return out.str();
}

std::string serialize_private_key(const KeyPair& pair) {
    return serialize_public_key(pair.pub) + "a=" + pair.priv.a.get_str() + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
    out << bytes;
    if (!out.flush())
        throw Error(ErrorKind::Io, "cannot write " + path.string());
}

std::map<std::string, std::string> parse_key_fields(
    const std::filesystem::path& path, bool want_private) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::map<std::string, std::string> fields;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Corruption,
                        "key file: malformed line in " + path.string());
        fields[line.substr(0, eq)] = line.substr(eq + 1);
    }
    std::vector<std::string> required = {"p", "g", "h"};
    if (want_private) required.push_back("a");
    for (const auto& name : required) {
        if (!fields.count(name))
            throw Error(ErrorKind::Corruption,
                        "key file: missing field '" + name + "'");
    }
    return fields;
}

mpz_class parse_decimal(const std::string& field, const std::string& value) {
    if (value.empty() ||
        value.find_first_not_of("0123456789") != std::string::npos)
        throw Error(ErrorKind::Corruption,
                    "key file: field '" + field + "' is not a decimal integer");
    return mpz_class(value, 10);
}

GroupParams params_from_fields(
    const std::map<std::string, std::string>& fields) {
    GroupParams params;
    params.p = parse_decimal("p", fields.at("p"));
    params.g = parse_decimal("g", fields.at("g"));
    if (params.p < 7 || !mpz_odd_p(params.p.get_mpz_t()))
        throw Error(ErrorKind::Corruption, "key file: p is not a valid modulus");
    params.q = (params.p - 1) / 2;
    if (!is_prime(params.p) || !is_prime(params.q))
        throw Error(ErrorKind::Corruption,
                    "key file: p is not a safe prime");
    if (params.g < 2 || params.g > params.p - 2)
        throw Error(ErrorKind::Corruption, "key file: g outside [2, p-2]");
    return params;
}

}  // namespace

void save_public_key(const std::filesystem::path& path, const PublicKey& key) {
    write_file(path, serialize_public_key(key));
}

void save_private_key(const std::filesystem::path& path, const KeyPair& pair) {
    write_file(path, serialize_private_key(pair));
}

PublicKey load_public_key(const std::filesystem::path& path) {
    auto fields = parse_key_fields(path, false);
    PublicKey key;
    key.params = params_from_fields(fields);
    key.h = parse_decimal("h", fields.at("h"));
    if (key.h < 1 || key.h >= key.params.p)
        throw Error(ErrorKind::Corruption, "key file: h outside [1, p-1]");
    return key;
}

KeyPair load_private_key(const std::filesystem::path& path) {
    auto fields = parse_key_fields(path, true);
    KeyPair pair;
    pair.pub.params = params_from_fields(fields);
    pair.pub.h = parse_decimal("h", fields.at("h"));
    if (pair.pub.h < 1 || pair.pub.h >= pair.pub.params.p)
        throw Error(ErrorKind::Corruption, "key file: h outside [1, p-1]");
    pair.priv.params = pair.pub.params;
    pair.priv.a = parse_decimal("a", fields.at("a"));
    if (pair.priv.a < 1 || pair.priv.a >= pair.priv.params.q)
        throw Error(ErrorKind::Corruption, "key file: a outside [1, q-1]");
    mpz_class expect;
    mpz_powm(expect.get_mpz_t(), pair.pub.params.g.get_mpz_t(),
             pair.priv.a.get_mpz_t(), pair.pub.params.p.get_mpz_t());
    if (expect != pair.pub.h)
        throw Error(ErrorKind::Corruption,
                    "key file: h does not match g^a mod p");
    return pair;
}

std::string key_fingerprint(const PublicKey& key) {
    Digest d = sha256(serialize_public_key(key));
    return hex_encode(d);
}

}  // namespace medchain::elgamal
