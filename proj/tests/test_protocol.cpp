#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "medchain/errors.hpp"
#include "medchain/protocol.hpp"

#include "support.hpp"

using namespace medchain;
using protocol::Role;
using protocol::ShareCipher;
using protocol::Simulation;
using protocol::SimulationConfig;

namespace {

SimulationConfig fast_config() {
    SimulationConfig config;
    config.key_bits = 128;
    config.chunk_width = 30;
    return config;
}

}  // namespace

TEST_CASE("the five-actor flow reproduces the payload end to end") {
    testsupport::TempDir dir;
    Simulation sim(fast_config(), Rng(7), dir.file("chain.blk"));

    CHECK_FALSE(sim.physician().keys.has_value());
    CHECK_FALSE(sim.diagnostic_center().keys.has_value());
    CHECK_FALSE(sim.blockchain_storage().keys.has_value());
    REQUIRE(sim.patient().keys.has_value());
    REQUIRE(sim.authorized_entity().keys.has_value());

    auto payload = sim.consult("Patient Name: Alice");
    REQUIRE(payload.image.has_value());

    std::uint64_t index = sim.publish(payload);
    CHECK(index == 0);
    REQUIRE(sim.patient().inbox.size() == 1);
    CHECK(sim.patient().inbox[0].kind == "block-index");
    CHECK(sim.patient().inbox[0].index == 0);

    // one transaction per encrypted chunk plus one for the envelope
    auto block = sim.store().get(0);
    CHECK(block.header.tx_count == 5 + 1);

    auto retrieved = sim.retrieve(index);
    CHECK(retrieved == payload);

    auto share = sim.share_with_ae(retrieved);
    CHECK(share.params.p != sim.patient().keys->pub.params.p);
    auto received = sim.ae_receive(share);
    CHECK(received == payload);

    // chain access records carry the pseudonym, nothing else
    auto log = sim.store().access_log(0);
    REQUIRE(log.size() == 1);
    CHECK(log[0].pseudonym == sim.patient().id.pseudonym);
    CHECK(log[0].pseudonym.rfind("pat-", 0) == 0);
}

TEST_CASE("publishing twice yields consecutive indices") {
    testsupport::TempDir dir;
    Simulation sim(fast_config(), Rng(8), dir.file("chain.blk"));
    auto payload = sim.consult("visit one");
    CHECK(sim.publish(payload) == 0);
    CHECK(sim.publish(payload) == 1);
    CHECK(sim.retrieve(1) == payload);
}

TEST_CASE("consult variants") {
    testsupport::TempDir dir;
    Simulation sim(fast_config(), Rng(9), dir.file("chain.blk"));

    auto text_only = sim.consult("no imaging today", false);
    CHECK_FALSE(text_only.image.has_value());
    CHECK(sim.publish(text_only) == 0);
    CHECK(sim.retrieve(0) == text_only);

    CHECK_THROWS_AS(sim.consult("", false), Error);
}

TEST_CASE("holders of foreign or no keys cannot decrypt") {
    testsupport::TempDir dir;
    Simulation sim(fast_config(), Rng(10), dir.file("chain.blk"));
    auto payload = sim.consult("confidential");
    std::uint64_t index = sim.publish(payload);

    // Reassemble the stored container the way a curious actor could.
    auto block = sim.store().get(index);
    std::string env_bytes(block.body[0].data.begin(), block.body[0].data.end());
    auto envelope = pipeline::parse_envelope(env_bytes);
    std::vector<std::string> chunks;
    for (std::size_t i = 1; i < block.body.size(); ++i)
        chunks.emplace_back(block.body[i].data.begin(), block.body[i].data.end());
    auto container = pipeline::assemble(envelope, chunks);

    // The physician and the DC hold no decryption keys at all.
    CHECK_FALSE(sim.physician().keys.has_value());
    CHECK_FALSE(sim.diagnostic_center().keys.has_value());

    // A fabricated key (all any other actor could do) is rejected.
    Rng rng(11);
    auto foreign =
        elgamal::keygen(elgamal::generate_params(128, rng), rng);
    try {
        pipeline::decrypt_emr(container, foreign.priv);
        FAIL("expected a wrong-key error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WrongKey);
    }

    // The AE key opens the share but not the stored container.
    try {
        pipeline::decrypt_emr(container, sim.authorized_entity().keys->priv);
        FAIL("expected a wrong-key error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WrongKey);
    }
}

TEST_CASE("shares are single-fold, non-deterministic and key-bound") {
    testsupport::TempDir dir;
    Simulation sim(fast_config(), Rng(12), dir.file("chain.blk"));
    auto payload = sim.consult("for the specialist");

    ShareCipher first = sim.share_with_ae(payload);
    ShareCipher second = sim.share_with_ae(payload);
    REQUIRE_FALSE(first.chunks.empty());
    CHECK(first.chunks[0].c1 != second.chunks[0].c1);
    CHECK(sim.ae_receive(first) == payload);
    CHECK(sim.ae_receive(second) == payload);

    SUBCASE("a non-AE key fails the share") {
        Rng rng(13);
        auto foreign =
            elgamal::keygen(elgamal::generate_params(128, rng), rng);
        try {
            protocol::share_decrypt(first, foreign.priv);
            FAIL("expected a wrong-key error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::WrongKey);
        }
    }
    SUBCASE("an empty share is rejected") {
        ShareCipher empty = first;
        empty.chunks.clear();
        CHECK_THROWS_AS(sim.ae_receive(empty), Error);
    }
    SUBCASE("share_decrypt round-trips directly") {
        Rng rng(14);
        auto keys = elgamal::keygen(elgamal::generate_params(128, rng), rng);
        auto share = protocol::share_encrypt(payload, keys.pub, 30, rng);
        CHECK(protocol::share_decrypt(share, keys.priv) == payload);
    }
}

TEST_CASE("simulations are deterministic under the seed") {
    testsupport::TempDir dir;
    Simulation a(fast_config(), Rng(55), dir.file("a.blk"));
    Simulation b(fast_config(), Rng(55), dir.file("b.blk"));

    CHECK(a.patient().id.pseudonym == b.patient().id.pseudonym);
    CHECK(a.authorized_entity().id.pseudonym ==
          b.authorized_entity().id.pseudonym);
    CHECK(elgamal::key_fingerprint(a.patient().keys->pub) ==
          elgamal::key_fingerprint(b.patient().keys->pub));

    auto pa = a.consult("same consult");
    auto pb = b.consult("same consult");
    CHECK(a.publish(pa) == b.publish(pb));
    CHECK(a.retrieve(0) == b.retrieve(0));
}
