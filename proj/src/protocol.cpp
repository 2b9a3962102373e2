#include "medchain/protocol.hpp"

#include <sstream>

#include "medchain/errors.hpp"

namespace medchain::protocol {

namespace {

// Fixed demo raster handed over by the diagnostic center.
emr::RasterImage demo_image() {
    emr::RasterImage image;
    image.width = 3;
    image.height = 3;
    image.rgb = {160, 10,  240, 166, 16,  186, 171, 17,  191,
                 139, 19,  239, 179, 29,  199, 139, 39,  239,
                 166, 16,  206, 123, 13,  183, 64,  64,  244};
    return image;
}

std::string make_pseudonym(Role role, Rng& rng) {
    static const char* prefix[] = {"pat", "phy", "dgc", "bst", "aue"};
    std::ostringstream out;
    out << prefix[static_cast<int>(role)] << '-' << std::hex;
    std::uint64_t token = rng.next_u64();
    for (int i = 0; i < 8; ++i) out << ((token >> (8 * i)) & 0xf);
    return out.str();
}

}  // namespace

const char* role_name(Role role) {
    switch (role) {
        case Role::Patient: return "patient";
        case Role::Physician: return "physician";
        case Role::DiagnosticCenter: return "diagnostic-center";
        case Role::BlockchainStorage: return "blockchain-storage";
        case Role::AuthorizedEntity: return "authorized-entity";
    }
    return "unknown";
}

ShareCipher share_encrypt(const emr::EmrPayload& payload,
                          const elgamal::PublicKey& key,
                          std::size_t chunk_width, Rng& rng) {
    emr::DigitStream stream = emr::payload_to_digits(payload);
    emr::ChunkSet chunks = emr::chunkify(stream, chunk_width);

    ShareCipher share;
    share.params = key.params;
    share.chunk_width = chunk_width;
    share.total_digit_count = chunks.total_digit_count;
    share.text_byte_count = stream.text_byte_count;
    share.image_dims = stream.image_dims;
    share.key_fingerprint = elgamal::key_fingerprint(key);
    share.chunks.reserve(chunks.chunks.size());
    for (const std::string& chunk : chunks.chunks) {
        mpz_class m("1" + chunk, 10);
        share.chunks.push_back(elgamal::encrypt_chunk(m, key, rng));
    }
    return share;
}

emr::EmrPayload share_decrypt(const ShareCipher& share,
                              const elgamal::PrivateKey& key) {
    if (share.chunks.empty())
        throw Error(ErrorKind::Domain, "share: no cipher chunks");
    mpz_class h;
    mpz_powm(h.get_mpz_t(), key.params.g.get_mpz_t(), key.a.get_mpz_t(),
             key.params.p.get_mpz_t());
    if (elgamal::key_fingerprint({key.params, h}) != share.key_fingerprint)
        throw Error(ErrorKind::WrongKey,
                    "share: key does not match share fingerprint");

    emr::ChunkSet chunks;
    chunks.chunk_width = share.chunk_width;
    chunks.total_digit_count = share.total_digit_count;
    chunks.chunks.reserve(share.chunks.size());
    for (std::size_t i = 0; i < share.chunks.size(); ++i) {
        mpz_class m = elgamal::decrypt_chunk(share.chunks[i], key);
        std::string digits = m.get_str();
        if (digits.size() > share.chunk_width + 1)
            throw Error(ErrorKind::WrongKey,
                        "share: sentinel check failed in chunk " +
                            std::to_string(i));
        digits.insert(0, share.chunk_width + 1 - digits.size(), '0');
        if (digits.front() != '1')
            throw Error(ErrorKind::WrongKey,
                        "share: sentinel check failed in chunk " +
                            std::to_string(i));
        chunks.chunks.push_back(digits.substr(1));
    }

    emr::DigitStream stream;
    stream.digits = emr::dechunkify(chunks);
    stream.text_byte_count = share.text_byte_count;
    stream.image_dims = share.image_dims;
    return emr::digits_to_payload(stream);
}

Simulation::Simulation(SimulationConfig config, Rng rng,
                       const std::filesystem::path& chain_path)
    : config_(config),
      rng_(rng),
      chain_(chain::Chain::create(chain_path)) {
    auto setup = [&](Actor& actor, Role role) {
        actor.role = role;
        actor.id.pseudonym = make_pseudonym(role, rng_);
    };
    setup(patient_, Role::Patient);
    setup(physician_, Role::Physician);
    setup(dc_, Role::DiagnosticCenter);
    setup(bs_, Role::BlockchainStorage);
    setup(ae_, Role::AuthorizedEntity);

    elgamal::GroupParams patient_group =
        elgamal::generate_params(config_.key_bits, rng_);
    patient_.keys = elgamal::keygen(patient_group, rng_);
    // The AE leg runs under different parameters: a fresh group, not a
    // fresh exponent in the same one.
    elgamal::GroupParams ae_group =
        elgamal::generate_params(config_.key_bits, rng_);
    ae_.keys = elgamal::keygen(ae_group, rng_);
}

emr::EmrPayload Simulation::consult(const std::string& physician_text,
                                    bool with_dc_image) {
    physician_.known_keys.push_back(patient_.keys->pub);
    emr::EmrPayload payload;
    payload.text.assign(physician_text.begin(), physician_text.end());
    if (with_dc_image) payload.image = demo_image();
    if (payload.text.empty() && !payload.image)
        throw Error(ErrorKind::Domain, "consult: produced an empty e-MR");
    return payload;
}

std::uint64_t Simulation::publish(const emr::EmrPayload& payload) {
    if (physician_.known_keys.empty())
        throw Error(ErrorKind::Parameter,
                    "publish: physician has no public key for the patient");
    const elgamal::PublicKey& pub = physician_.known_keys.back();
    std::size_t width = config_.chunk_width != 0
                            ? config_.chunk_width
                            : pipeline::default_chunk_width(pub);
    pipeline::EncryptedEmr enc =
        pipeline::encrypt_emr(payload, pub, config_.dna, width, rng_);

    std::vector<chain::Transaction> txs;
    std::string envelope_bytes = pipeline::serialize_envelope(enc.envelope);
    txs.push_back({{envelope_bytes.begin(), envelope_bytes.end()}});
    for (const std::string& chunk : pipeline::payload_chunks(enc))
        txs.push_back({{chunk.begin(), chunk.end()}});

    std::uint64_t index = chain_.append(txs, next_timestamp());
    patient_.inbox.push_back(Message{"block-index", index});
    return index;
}

emr::EmrPayload Simulation::retrieve(std::uint64_t index) {
    chain::Block block = chain_.get(index);
    chain_.log_access(index, patient_.id.pseudonym, next_timestamp());

    if (block.body.empty())
        throw Error(ErrorKind::Corruption, "retrieve: block has no transactions");
    std::string envelope_bytes(block.body.front().data.begin(),
                               block.body.front().data.end());
    pipeline::Envelope envelope = pipeline::parse_envelope(envelope_bytes);
    if (block.body.size() != envelope.n_chunks + 1)
        throw Error(ErrorKind::Corruption,
                    "retrieve: block transaction count does not match envelope");
    std::vector<std::string> chunks;
    chunks.reserve(envelope.n_chunks);
    for (std::size_t i = 1; i < block.body.size(); ++i)
        chunks.emplace_back(block.body[i].data.begin(),
                            block.body[i].data.end());

    pipeline::EncryptedEmr enc = pipeline::assemble(envelope, chunks);
    return pipeline::decrypt_emr(enc, patient_.keys->priv);
}

ShareCipher Simulation::share_with_ae(const emr::EmrPayload& payload) {
    const elgamal::PublicKey& ae_pub = ae_.keys->pub;
    if (ae_pub.params.p == patient_.keys->pub.params.p)
        throw Error(ErrorKind::Parameter,
                    "share: AE group must differ from the patient's");
    std::size_t width = pipeline::default_chunk_width(ae_pub);
    return share_encrypt(payload, ae_pub, width, rng_);
}

emr::EmrPayload Simulation::ae_receive(const ShareCipher& share) {
    return share_decrypt(share, ae_.keys->priv);
}

}  // namespace medchain::protocol
