#include "medchain/pipeline.hpp"

#include <sstream>
#include <vector>

#include "medchain/errors.hpp"

namespace medchain::pipeline {

namespace {

// Fixed-width big-endian rendering of v, exactly `width` bits.
dna::BitString to_fixed_bits(const mpz_class& v, std::size_t width) {
    if (mpz_sgn(v.get_mpz_t()) < 0 ||
        mpz_sizeinbase(v.get_mpz_t(), 2) > width)
        throw Error(ErrorKind::Domain, "pipeline: value exceeds bit width");
    dna::BitString bits(width, 0);
    for (std::size_t i = 0; i < width; ++i)
        bits[i] = static_cast<std::uint8_t>(
            mpz_tstbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(width - 1 - i)));
    return bits;
}

mpz_class from_bits(const dna::BitString& bits, std::size_t begin,
                    std::size_t count) {
    // Pack into bytes (leading zero padding keeps the value) and import.
    std::vector<std::uint8_t> bytes((count + 7) / 8, 0);
    std::size_t lead = bytes.size() * 8 - count;
    for (std::size_t i = 0; i < count; ++i) {
        if (bits[begin + i])
            bytes[(lead + i) / 8] |= static_cast<std::uint8_t>(
                0x80u >> ((lead + i) % 8));
    }
    mpz_class out;
    mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
    return out;
}

mpz_class pow10(std::size_t exponent) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), 10, static_cast<unsigned long>(exponent));
    return out;
}

void check_chunk_width(std::size_t chunk_width, const mpz_class& p) {
    if (chunk_width == 0)
        throw Error(ErrorKind::Config, "pipeline: chunk_width must be >= 1");
    if (pow10(chunk_width + 1) >= p)
        throw Error(ErrorKind::Config,
                    "pipeline: chunk_width too large for the key modulus");
}

std::size_t expected_payload_length(const Envelope& env) {
    std::size_t total = env.n_chunks * env.cipher_component_bits;
    for (std::size_t i = 0; i + 1 < env.n_chunks; ++i)
        total += dna::dummy_count(env.dna, env.dna.x0 + i);
    return total;
}

void check_envelope(const Envelope& env) {
    if (env.version != kContainerVersion)
        throw Error(ErrorKind::Version, "container: unknown version");
    if (env.chunk_width == 0)
        throw Error(ErrorKind::Corruption, "container: chunk_width must be >= 1");
    if (env.total_digit_count == 0)
        throw Error(ErrorKind::Corruption,
                    "container: total_digit_count must be >= 1");
    std::size_t expect_digits = 3 * env.text_byte_count;
    if (env.image_dims) {
        if (env.image_dims->first == 0 || env.image_dims->second == 0)
            throw Error(ErrorKind::Corruption,
                        "container: image dimensions must be >= 1");
        expect_digits += 9 * env.image_dims->first * env.image_dims->second;
    }
    if (env.total_digit_count != expect_digits)
        throw Error(ErrorKind::Corruption,
                    "container: total_digit_count inconsistent with counts");
    std::size_t expect_chunks =
        (env.total_digit_count + env.chunk_width - 1) / env.chunk_width;
    if (env.n_chunks != expect_chunks)
        throw Error(ErrorKind::Corruption,
                    "container: n_chunks inconsistent with digit count");
    if (env.dna.b < 2)
        throw Error(ErrorKind::Corruption, "container: b must be >= 2");
    if (env.dna.x0 < 2)
        throw Error(ErrorKind::Corruption, "container: x0 must be >= 2");
    if (env.cipher_component_bits < elgamal::kMinBitLength)
        throw Error(ErrorKind::Corruption,
                    "container: cipher_component_bits too small");
    if (env.key_fingerprint.size() != 64 ||
        env.key_fingerprint.find_first_not_of("0123456789abcdef") !=
            std::string::npos)
        throw Error(ErrorKind::Corruption,
                    "container: key_fingerprint must be 64 hex characters");
}

}  // namespace

std::size_t default_chunk_width(const elgamal::PublicKey& key) {
    std::size_t digits = mpz_sizeinbase(key.params.p.get_mpz_t(), 10);
    std::size_t width = std::min(kDefaultChunkWidth, digits - 2);
    while (width > 0 && pow10(width + 1) >= key.params.p) --width;
    if (width == 0)
        throw Error(ErrorKind::Config,
                    "pipeline: key modulus too small for any chunk width");
    return width;
}

EncryptedEmr encrypt_emr(const emr::EmrPayload& payload,
                         const elgamal::PublicKey& key,
                         const dna::DnaParams& dna_params,
                         std::size_t chunk_width, Rng& rng) {
    check_chunk_width(chunk_width, key.params.p);

    emr::DigitStream stream = emr::payload_to_digits(payload);
    emr::ChunkSet chunks = emr::chunkify(stream, chunk_width);

    std::size_t component_bits = mpz_sizeinbase(key.params.p.get_mpz_t(), 2);
    std::vector<std::string> dna_chunks;
    dna_chunks.reserve(chunks.chunks.size());
    for (const std::string& chunk : chunks.chunks) {
        mpz_class m("1" + chunk, 10);  // sentinel keeps leading zeros
        elgamal::CipherPair cipher = elgamal::encrypt_chunk(m, key, rng);
        dna::BitString bits = to_fixed_bits(cipher.c1, component_bits);
        dna::BitString c2_bits = to_fixed_bits(cipher.c2, component_bits);
        bits.insert(bits.end(), c2_bits.begin(), c2_bits.end());
        dna_chunks.push_back(dna::bits_to_dna(bits));
    }

    EncryptedEmr enc;
    enc.envelope.version = kContainerVersion;
    enc.envelope.chunk_width = chunk_width;
    enc.envelope.total_digit_count = chunks.total_digit_count;
    enc.envelope.text_byte_count = stream.text_byte_count;
    enc.envelope.image_dims = stream.image_dims;
    enc.envelope.n_chunks = chunks.chunks.size();
    enc.envelope.dna = dna_params;
    enc.envelope.cipher_component_bits = component_bits;
    enc.envelope.key_fingerprint = elgamal::key_fingerprint(key);
    enc.payload = dna::interleave(dna_chunks, dna_params);
    return enc;
}

emr::EmrPayload decrypt_emr(const EncryptedEmr& enc,
                            const elgamal::PrivateKey& key) {
    const Envelope& env = enc.envelope;
    check_envelope(env);

    mpz_class h;
    mpz_powm(h.get_mpz_t(), key.params.g.get_mpz_t(), key.a.get_mpz_t(),
             key.params.p.get_mpz_t());
    elgamal::PublicKey pub{key.params, h};
    if (elgamal::key_fingerprint(pub) != env.key_fingerprint)
        throw Error(ErrorKind::WrongKey,
                    "decrypt: key does not match container fingerprint");
    if (mpz_sizeinbase(key.params.p.get_mpz_t(), 2) !=
        env.cipher_component_bits)
        throw Error(ErrorKind::Corruption,
                    "decrypt: cipher_component_bits does not match key");

    std::vector<std::string> dna_chunks = dna::deinterleave(
        enc.payload, env.cipher_component_bits, env.n_chunks, env.dna);

    emr::ChunkSet chunks;
    chunks.chunk_width = env.chunk_width;
    chunks.total_digit_count = env.total_digit_count;
    chunks.chunks.reserve(env.n_chunks);
    for (std::size_t i = 0; i < dna_chunks.size(); ++i) {
        dna::BitString bits = dna::dna_to_bits(dna_chunks[i]);
        elgamal::CipherPair cipher;
        cipher.c1 = from_bits(bits, 0, env.cipher_component_bits);
        cipher.c2 = from_bits(bits, env.cipher_component_bits,
                              env.cipher_component_bits);
        if (cipher.c1 < 1 || cipher.c1 >= key.params.p || cipher.c2 < 1 ||
            cipher.c2 >= key.params.p)
            throw Error(ErrorKind::Corruption,
                        "decrypt: cipher component out of range in chunk " +
                            std::to_string(i));
        mpz_class m = elgamal::decrypt_chunk(cipher, key);
        std::string digits = m.get_str();
        if (digits.size() > env.chunk_width + 1)
            throw Error(ErrorKind::WrongKey,
                        "decrypt: sentinel check failed in chunk " +
                            std::to_string(i));
        digits.insert(0, env.chunk_width + 1 - digits.size(), '0');
        if (digits.front() != '1')
            throw Error(ErrorKind::WrongKey,
                        "decrypt: sentinel check failed in chunk " +
                            std::to_string(i));
        chunks.chunks.push_back(digits.substr(1));
    }

    emr::DigitStream stream;
    stream.digits = emr::dechunkify(chunks);
    stream.text_byte_count = env.text_byte_count;
    stream.image_dims = env.image_dims;
    return emr::digits_to_payload(stream);
}

std::string serialize_envelope(const Envelope& env) {
    check_envelope(env);
    std::ostringstream out;
    out << "version=" << env.version << '\n'
        << "chunk_width=" << env.chunk_width << '\n'
        << "total_digit_count=" << env.total_digit_count << '\n'
        << "text_byte_count=" << env.text_byte_count << '\n';
    if (env.image_dims)
        out << "image_width=" << env.image_dims->first << '\n'
            << "image_height=" << env.image_dims->second << '\n';
    out << "n_chunks=" << env.n_chunks << '\n'
        << "b=" << env.dna.b << '\n'
        << "x0=" << env.dna.x0 << '\n'
        << "cipher_component_bits=" << env.cipher_component_bits << '\n'
        << "key_fingerprint=" << env.key_fingerprint << '\n'
        << '\n';
    return out.str();
}

namespace {

class FieldReader {
public:
    explicit FieldReader(std::string_view header) : rest_(header) {}

    // Consumes the next `name=value` line; the format is ordered, so a
    // mismatch is a hard error naming the expected field.
    std::string expect(const std::string& name) {
        auto line = next_line();
        if (!line)
            throw Error(ErrorKind::Corruption,
                        "container: missing field '" + name + "'");
        auto eq = line->find('=');
        if (eq == std::string_view::npos || line->substr(0, eq) != name)
            throw Error(ErrorKind::Corruption,
                        "container: expected field '" + name + "'");
        return std::string(line->substr(eq + 1));
    }

    bool peek_is(const std::string& name) {
        return rest_.substr(0, name.size() + 1) == name + "=";
    }

    void expect_end() {
        if (next_line())
            throw Error(ErrorKind::Corruption,
                        "container: unexpected trailing header field");
        if (!rest_.empty())
            throw Error(ErrorKind::Corruption,
                        "container: unexpected bytes after header");
    }

private:
    std::optional<std::string_view> next_line() {
        if (rest_.empty()) return std::nullopt;
        auto nl = rest_.find('\n');
        if (nl == std::string_view::npos)
            throw Error(ErrorKind::Corruption,
                        "container: unterminated header line");
        std::string_view line = rest_.substr(0, nl);
        rest_.remove_prefix(nl + 1);
        if (line.empty()) return std::nullopt;
        return line;
    }

    std::string_view rest_;
};

std::uint64_t parse_uint(const std::string& field, const std::string& value) {
    if (value.empty() || value.size() > 19 ||
        value.find_first_not_of("0123456789") != std::string::npos)
        throw Error(ErrorKind::Corruption,
                    "container: field '" + field + "' is not an unsigned integer");
    return std::stoull(value);
}

}  // namespace

Envelope parse_envelope(std::string_view bytes) {
    FieldReader reader(bytes);
    Envelope env;
    std::string version = reader.expect("version");
    if (parse_uint("version", version) != kContainerVersion)
        throw Error(ErrorKind::Version,
                    "container: unknown version '" + version + "'");
    env.version = kContainerVersion;
    env.chunk_width = parse_uint("chunk_width", reader.expect("chunk_width"));
    env.total_digit_count =
        parse_uint("total_digit_count", reader.expect("total_digit_count"));
    env.text_byte_count =
        parse_uint("text_byte_count", reader.expect("text_byte_count"));
    if (reader.peek_is("image_width")) {
        std::size_t w = parse_uint("image_width", reader.expect("image_width"));
        std::size_t h =
            parse_uint("image_height", reader.expect("image_height"));
        env.image_dims = {w, h};
    }
    env.n_chunks = parse_uint("n_chunks", reader.expect("n_chunks"));
    env.dna.b = static_cast<std::uint32_t>(parse_uint("b", reader.expect("b")));
    env.dna.x0 = parse_uint("x0", reader.expect("x0"));
    env.cipher_component_bits = parse_uint(
        "cipher_component_bits", reader.expect("cipher_component_bits"));
    env.key_fingerprint = reader.expect("key_fingerprint");
    reader.expect_end();
    check_envelope(env);
    return env;
}

std::string serialize_container(const EncryptedEmr& enc) {
    std::string out = serialize_envelope(enc.envelope);
    if (enc.payload.empty())
        throw Error(ErrorKind::Domain, "container: empty payload");
    if (enc.payload.size() != expected_payload_length(enc.envelope))
        throw Error(ErrorKind::Corruption,
                    "container: payload violates the length law");
    out += enc.payload;
    return out;
}

EncryptedEmr parse_container(std::string_view bytes) {
    auto split = bytes.find("\n\n");
    if (split == std::string_view::npos)
        throw Error(ErrorKind::Corruption,
                    "container: missing blank line after header");

    EncryptedEmr enc;
    enc.envelope = parse_envelope(bytes.substr(0, split + 2));
    std::string_view payload = bytes.substr(split + 2);
    if (payload.find_first_not_of("ACGT") != std::string_view::npos)
        throw Error(ErrorKind::Corruption,
                    "container: field 'payload' has a character outside ACGT");
    if (payload.size() != expected_payload_length(enc.envelope))
        throw Error(ErrorKind::Corruption,
                    "container: field 'payload' violates the length law");
    enc.payload = std::string(payload);
    return enc;
}

std::vector<std::string> payload_chunks(const EncryptedEmr& enc) {
    return dna::deinterleave(enc.payload, enc.envelope.cipher_component_bits,
                             enc.envelope.n_chunks, enc.envelope.dna);
}

EncryptedEmr assemble(const Envelope& envelope,
                      const std::vector<std::string>& chunks) {
    check_envelope(envelope);
    if (chunks.size() != envelope.n_chunks)
        throw Error(ErrorKind::Corruption,
                    "container: chunk count does not match envelope");
    for (const auto& chunk : chunks) {
        if (chunk.size() != envelope.cipher_component_bits)
            throw Error(ErrorKind::Corruption,
                        "container: chunk length does not match envelope");
        if (chunk.find_first_not_of("ACGT") != std::string::npos)
            throw Error(ErrorKind::Corruption,
                        "container: chunk has a character outside ACGT");
    }
    EncryptedEmr enc;
    enc.envelope = envelope;
    enc.payload = dna::interleave(chunks, envelope.dna);
    return enc;
}

}  // namespace medchain::pipeline
