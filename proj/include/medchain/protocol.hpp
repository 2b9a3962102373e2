#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medchain/chainstore.hpp"
#include "medchain/elgamal.hpp"
#include "medchain/emr.hpp"
#include "medchain/pipeline.hpp"
#include "medchain/rng.hpp"

namespace medchain::protocol {

enum class Role {
    Patient,
    Physician,
    DiagnosticCenter,
    BlockchainStorage,
    AuthorizedEntity,
};

const char* role_name(Role role);

/// Opaque pseudonym; carries no real identity and is the only actor
/// identifier that ever reaches the chain.
struct ActorId {
    std::string pseudonym;
};

struct Message {
    std::string kind;
    std::uint64_t index = 0;
};

/// Simulation participant. Only the Patient and the AuthorizedEntity hold
/// key pairs; the Physician and the DiagnosticCenter never do.
struct Actor {
    Role role = Role::Patient;
    ActorId id;
    std::optional<elgamal::KeyPair> keys;
    std::vector<elgamal::PublicKey> known_keys;  // public keys shared with us
    std::vector<Message> inbox;
};

/// Single-fold share for the patient -> AE leg: ElGamal chunks, no DNA
/// stage, under a group distinct from the patient's.
struct ShareCipher {
    elgamal::GroupParams params;
    std::vector<elgamal::CipherPair> chunks;
    std::size_t chunk_width = 0;
    std::size_t total_digit_count = 0;
    std::size_t text_byte_count = 0;
    std::optional<std::pair<std::size_t, std::size_t>> image_dims;
    std::string key_fingerprint;
};

struct SimulationConfig {
    unsigned key_bits = 1024;
    std::size_t chunk_width = 0;  // 0 = widest width the patient key allows
    dna::DnaParams dna;
    std::int64_t base_timestamp = 1700000000;  // fixed clock keeps runs reproducible
};

/// In-process five-actor simulation. Actor steps run in program order; the
/// patient and the AE get independently generated groups ("different
/// parameters" for the AE leg).
class Simulation {
public:
    Simulation(SimulationConfig config, Rng rng,
               const std::filesystem::path& chain_path);

    Actor& patient() { return patient_; }
    Actor& physician() { return physician_; }
    Actor& diagnostic_center() { return dc_; }
    Actor& blockchain_storage() { return bs_; }
    Actor& authorized_entity() { return ae_; }
    chain::Chain& store() { return chain_; }

    /// Physician-authored text plus the DC-supplied image; shares the
    /// patient's public key with the physician. Pass no dc for text only.
    emr::EmrPayload consult(const std::string& physician_text,
                            bool with_dc_image = true);

    /// Two-fold encrypt under the patient's public key, append one block
    /// (one tx per encrypted chunk plus one for the envelope) and deliver
    /// the block index to the patient's inbox.
    std::uint64_t publish(const emr::EmrPayload& payload);

    /// Fetch the block by index (access is logged under the patient's
    /// pseudonym), reassemble the container and two-fold decrypt it.
    emr::EmrPayload retrieve(std::uint64_t index);

    /// Single-fold re-encryption of the plain payload for the AE.
    ShareCipher share_with_ae(const emr::EmrPayload& payload);

    /// AE-side decryption of a share.
    emr::EmrPayload ae_receive(const ShareCipher& share);

    std::int64_t next_timestamp() { return config_.base_timestamp + tick_++; }

private:
    SimulationConfig config_;
    Rng rng_;
    chain::Chain chain_;
    std::int64_t tick_ = 0;
    Actor patient_, physician_, dc_, bs_, ae_;
};

/// The single-fold encryption used for the AE leg, exposed for tests:
/// digits -> sentinel chunks -> ElGamal under `key`.
ShareCipher share_encrypt(const emr::EmrPayload& payload,
                          const elgamal::PublicKey& key,
                          std::size_t chunk_width, Rng& rng);

/// Inverse of share_encrypt.
emr::EmrPayload share_decrypt(const ShareCipher& share,
                              const elgamal::PrivateKey& key);

}  // namespace medchain::protocol
