#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "medchain/bench.hpp"
#include "medchain/chainstore.hpp"
#include "medchain/elgamal.hpp"
#include "medchain/emr.hpp"
#include "medchain/errors.hpp"
#include "medchain/pipeline.hpp"
#include "medchain/protocol.hpp"
#include "medchain/rng.hpp"

using namespace medchain;

namespace {

std::vector<std::uint8_t> slurp_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        bytes.insert(bytes.end(), buf, buf + in.gcount());
    return bytes;
}

void write_bytes(const std::filesystem::path& path,
                 const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
    out.write(static_cast<const char*>(data),
              static_cast<std::streamsize>(size));
    if (!out.flush()) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

// --seed flag, then MEDCHAIN_SEED, then entropy.
Rng make_rng(const std::optional<std::uint64_t>& seed_flag) {
    if (seed_flag) return Rng(*seed_flag);
    if (const char* env = std::getenv("MEDCHAIN_SEED")) {
        std::string value(env);
        if (value.empty() ||
            value.find_first_not_of("0123456789") != std::string::npos)
            throw Error(ErrorKind::Parameter,
                        "MEDCHAIN_SEED must be an unsigned integer");
        return Rng(std::stoull(value));
    }
    return Rng::from_entropy();
}

int cmd_keygen(unsigned bits, const std::string& out_base,
               const std::optional<std::uint64_t>& seed) {
    Rng rng = make_rng(seed);
    auto params = elgamal::generate_params(bits, rng);
    auto pair = elgamal::keygen(params, rng);
    elgamal::save_public_key(out_base + ".pub", pair.pub);
    elgamal::save_private_key(out_base + ".priv", pair);
    std::cout << "public key:  " << out_base << ".pub\n"
              << "private key: " << out_base << ".priv\n"
              << "fingerprint: " << elgamal::key_fingerprint(pair.pub) << "\n";
    return 0;
}

int cmd_encrypt(const std::string& key_path, const std::string& text_path,
                const std::string& image_path, const std::string& out_path,
                std::size_t chunk_width, std::uint32_t b, std::uint64_t x0,
                const std::optional<std::uint64_t>& seed) {
    auto pub = elgamal::load_public_key(key_path);
    emr::EmrPayload payload;
    if (!text_path.empty()) payload.text = slurp_bytes(text_path);
    if (!image_path.empty()) payload.image = emr::read_ppm(image_path);
    if (payload.text.empty() && !payload.image)
        throw Error(ErrorKind::Parameter,
                    "encrypt: need --text and/or --image with content");

    if (chunk_width == 0) chunk_width = pipeline::default_chunk_width(pub);
    dna::DnaParams dna_params{b, x0};
    Rng rng = make_rng(seed);
    auto enc =
        pipeline::encrypt_emr(payload, pub, dna_params, chunk_width, rng);
    std::string container = pipeline::serialize_container(enc);
    write_bytes(out_path, container.data(), container.size());
    std::cout << "encrypted " << (payload.text.size() +
                                  (payload.image ? payload.image->rgb.size() : 0))
              << " plain bytes into " << container.size()
              << " container bytes (" << enc.envelope.n_chunks
              << " chunks, width " << chunk_width << ")\n";
    return 0;
}

int cmd_decrypt(const std::string& key_path, const std::string& in_path,
                const std::string& out_text, const std::string& out_image) {
    auto pair = elgamal::load_private_key(key_path);
    auto bytes = slurp_bytes(in_path);
    auto enc = pipeline::parse_container(
        std::string_view(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size()));
    auto payload = pipeline::decrypt_emr(enc, pair.priv);
    if (!out_text.empty())
        write_bytes(out_text, payload.text.data(), payload.text.size());
    if (!out_image.empty()) {
        if (!payload.image)
            throw Error(ErrorKind::Parameter,
                        "decrypt: container has no image for --out-image");
        emr::write_ppm(out_image, *payload.image, true);
    }
    std::cout << "decrypted " << payload.text.size() << " text bytes";
    if (payload.image)
        std::cout << " and a " << payload.image->width << "x"
                  << payload.image->height << " image";
    std::cout << "\n";
    if (payload.image && out_image.empty())
        std::cerr << "note: image present but --out-image not given\n";
    return 0;
}

std::vector<chain::Transaction> container_transactions(
    const pipeline::EncryptedEmr& enc) {
    std::vector<chain::Transaction> txs;
    std::string envelope = pipeline::serialize_envelope(enc.envelope);
    txs.push_back({{envelope.begin(), envelope.end()}});
    for (const std::string& chunk : pipeline::payload_chunks(enc))
        txs.push_back({{chunk.begin(), chunk.end()}});
    return txs;
}

int cmd_chain_append(const std::string& path, const std::string& container,
                     std::optional<std::int64_t> timestamp) {
    auto store = chain::Chain::open(path);
    auto bytes = slurp_bytes(container);
    auto enc = pipeline::parse_container(
        std::string_view(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size()));
    std::int64_t ts = timestamp ? *timestamp : std::time(nullptr);
    std::uint64_t index = store.append(container_transactions(enc), ts);
    std::cout << "I_BS = " << index << "\n";
    return 0;
}

int cmd_chain_get(const std::string& path, std::uint64_t index,
                  const std::string& out_path) {
    auto store = chain::Chain::open(path);
    auto block = store.get(index);
    if (block.body.empty())
        throw Error(ErrorKind::Corruption, "chain: block has no transactions");
    std::string env_bytes(block.body[0].data.begin(), block.body[0].data.end());
    auto envelope = pipeline::parse_envelope(env_bytes);
    if (block.body.size() != envelope.n_chunks + 1)
        throw Error(ErrorKind::Corruption,
                    "chain: transaction count does not match envelope");
    std::vector<std::string> chunks;
    for (std::size_t i = 1; i < block.body.size(); ++i)
        chunks.emplace_back(block.body[i].data.begin(), block.body[i].data.end());
    auto enc = pipeline::assemble(envelope, chunks);
    std::string container = pipeline::serialize_container(enc);
    write_bytes(out_path, container.data(), container.size());
    std::cout << "wrote block " << index << " container to " << out_path
              << " (" << container.size() << " bytes)\n";
    return 0;
}

int cmd_chain_verify(const std::string& path) {
    try {
        auto store = chain::Chain::open(path);  // open() already verifies
        if (auto bad = store.verify()) {
            std::cout << "chain verification FAILED at block " << *bad << "\n";
            return 1;
        }
        std::cout << "chain OK (" << store.size() << " blocks)\n";
        return 0;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Tamper) throw;
        std::cout << "chain verification FAILED: " << e.what() << "\n";
        return 1;
    }
}

int cmd_chain_log(const std::string& path,
                  std::optional<std::uint64_t> index) {
    auto store = chain::Chain::open(path);
    for (const auto& record : store.access_log(index))
        std::cout << record.timestamp << ' ' << record.index << ' '
                  << record.pseudonym << "\n";
    return 0;
}

int cmd_demo(const std::optional<std::uint64_t>& seed, unsigned bits,
             std::string chain_dir) {
    Rng rng = make_rng(seed);
    bool scratch = chain_dir.empty();
    std::filesystem::path dir = scratch
        ? std::filesystem::temp_directory_path() /
              ("medchain-demo-" + std::to_string(::getpid()))
        : std::filesystem::path(chain_dir);
    std::filesystem::create_directories(dir);

    protocol::SimulationConfig config;
    config.key_bits = bits;
    int status = 1;
    {
        protocol::Simulation sim(config, std::move(rng), dir / "chain.blk");

        std::cout << "=== medchain demo ===\n";
        std::cout << "actors\n";
        for (const protocol::Actor* actor :
             {&sim.patient(), &sim.physician(), &sim.diagnostic_center(),
              &sim.blockchain_storage(), &sim.authorized_entity()}) {
            std::ostringstream role;
            role << protocol::role_name(actor->role);
            std::cout << "  " << role.str()
                      << std::string(20 - role.str().size(), ' ')
                      << actor->id.pseudonym << "\n";
        }
        std::cout << "keys\n  patient group bits " << bits << ", fingerprint "
                  << elgamal::key_fingerprint(sim.patient().keys->pub) << "\n";
        std::cout << "  ae group bits " << bits << ", fingerprint "
                  << elgamal::key_fingerprint(sim.authorized_entity().keys->pub)
                  << " (different parameters)\n";

        std::cout << "consult\n";
        auto payload = sim.consult("Patient Name: Alice");
        std::cout << "  physician text: \"Patient Name: Alice\" ("
                  << payload.text.size() << " bytes)\n  dc image: "
                  << payload.image->width << "x" << payload.image->height
                  << " px\n";

        std::cout << "publish\n";
        std::uint64_t index = sim.publish(payload);
        auto block = sim.store().get(index);
        std::cout << "  block appended: I_BS = " << index
                  << " (tx_count = " << block.header.tx_count << ")\n"
                  << "  index delivered to patient inbox: "
                  << sim.patient().inbox.back().index << "\n";

        std::cout << "retrieve\n";
        auto retrieved = sim.retrieve(index);
        auto log = sim.store().access_log(index);
        std::cout << "  access logged: " << log.back().pseudonym
                  << " -> block " << index << "\n"
                  << "  chain verify: "
                  << (sim.store().verify() ? "FAILED" : "ok") << "\n"
                  << "  payload match: "
                  << (retrieved == payload ? "yes" : "NO") << "\n";

        std::cout << "share with AE\n";
        auto share = sim.share_with_ae(retrieved);
        std::cout << "  single-fold ElGamal chunks: " << share.chunks.size()
                  << " (groups differ: "
                  << (share.params.p != sim.patient().keys->pub.params.p
                          ? "yes" : "NO")
                  << ")\n";

        auto received = sim.ae_receive(share);
        std::cout << "ae receive\n  payload match: "
                  << (received == payload ? "yes" : "NO") << "\n";

        bool ok = retrieved == payload && received == payload &&
                  !sim.store().verify();
        std::cout << "payload match: " << (ok ? "OK" : "MISMATCH") << "\n";
        status = ok ? 0 : 1;
    }
    if (scratch) {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    return status;
}

int cmd_bench(const std::string& sizes, const std::string& out_csv,
              const std::optional<std::uint64_t>& seed, unsigned runs,
              unsigned bits, std::size_t chunk_width) {
    Rng rng = make_rng(seed);
    auto params = elgamal::generate_params(bits, rng);
    auto keys = elgamal::keygen(params, rng);
    if (chunk_width == 0) chunk_width = pipeline::default_chunk_width(keys.pub);
    dna::DnaParams dna_params;

    std::vector<bench::SizeSpec> specs;
    std::stringstream list(sizes);
    std::string item;
    while (std::getline(list, item, ','))
        if (!item.empty()) specs.push_back(bench::parse_size_spec(item));
    if (specs.empty())
        throw Error(ErrorKind::Parameter, "bench: no sizes given");

    auto scratch = std::filesystem::temp_directory_path() /
                   ("medchain-bench-" + std::to_string(::getpid()));
    std::ostringstream csv;
    csv << bench::csv_header() << "\n";
    for (const auto& spec : specs) {
        auto record = bench::run_bench(spec, keys, dna_params, chunk_width,
                                       rng, scratch, runs);
        csv << bench::csv_row(record) << "\n";
    }
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);

    std::cout << csv.str();
    if (!out_csv.empty())
        write_bytes(out_csv, csv.str().data(), csv.str().size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-fold e-MR encryption over an append-only block store"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed may follow the subcommand name

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed,
                   "deterministic seed (falls back to MEDCHAIN_SEED)");

    // keygen
    auto* keygen = app.add_subcommand("keygen", "generate an ElGamal key pair");
    unsigned kg_bits = 1024;
    std::string kg_out;
    keygen->add_option("--bits", kg_bits, "modulus bit length")
        ->capture_default_str();
    keygen->add_option("--out", kg_out, "output base path")->required();

    // encrypt
    auto* encrypt = app.add_subcommand("encrypt", "two-fold encrypt an e-MR");
    std::string en_key, en_text, en_image, en_out;
    std::size_t en_width = 0;
    std::uint32_t en_b = 3;
    std::uint64_t en_x0 = 10;
    encrypt->add_option("--key", en_key, "public key file")->required();
    encrypt->add_option("--text", en_text, "text input file");
    encrypt->add_option("--image", en_image, "PPM image input file");
    encrypt->add_option("--out", en_out, "container output file")->required();
    encrypt->add_option("--chunk-width", en_width,
                        "digits per chunk (default: widest for the key)");
    encrypt->add_option("--b", en_b, "DNA schedule base")->capture_default_str();
    encrypt->add_option("--x0", en_x0, "DNA schedule start")
        ->capture_default_str();

    // decrypt
    auto* decrypt = app.add_subcommand("decrypt", "decrypt a container");
    std::string de_key, de_in, de_text, de_image;
    decrypt->add_option("--key", de_key, "private key file")->required();
    decrypt->add_option("--in", de_in, "container input file")->required();
    decrypt->add_option("--out-text", de_text, "text output file");
    decrypt->add_option("--out-image", de_image, "PPM image output file");

    // chain
    auto* chain_cmd = app.add_subcommand("chain", "block store operations");
    chain_cmd->require_subcommand(1);
    std::string ch_path, ch_container, ch_out;
    std::uint64_t ch_index = 0;
    std::optional<std::int64_t> ch_timestamp;
    std::optional<std::uint64_t> ch_log_index;

    auto* ch_init = chain_cmd->add_subcommand("init", "create an empty chain");
    ch_init->add_option("--path", ch_path, "chain file")->required();

    auto* ch_append =
        chain_cmd->add_subcommand("append", "append a container as one block");
    ch_append->add_option("--path", ch_path, "chain file")->required();
    ch_append->add_option("--container", ch_container, "container file")
        ->required();
    ch_append->add_option("--timestamp", ch_timestamp,
                          "block timestamp (default: now)");

    auto* ch_get =
        chain_cmd->add_subcommand("get", "extract a block's container");
    ch_get->add_option("--path", ch_path, "chain file")->required();
    ch_get->add_option("--index", ch_index, "block index")->required();
    ch_get->add_option("--out", ch_out, "container output file")->required();

    auto* ch_verify = chain_cmd->add_subcommand("verify", "verify every link");
    ch_verify->add_option("--path", ch_path, "chain file")->required();

    auto* ch_log = chain_cmd->add_subcommand("log", "show access records");
    ch_log->add_option("--path", ch_path, "chain file")->required();
    ch_log->add_option("--index", ch_log_index, "filter by block index");

    // demo
    auto* demo = app.add_subcommand("demo", "run the five-actor sharing flow");
    unsigned demo_bits = 1024;
    std::string demo_dir;
    demo->add_option("--bits", demo_bits, "key size for the demo")
        ->capture_default_str();
    demo->add_option("--chain-dir", demo_dir,
                     "keep chain files here instead of a scratch dir");

    // bench
    auto* bench_cmd =
        app.add_subcommand("bench", "measure sizes and timings, emit CSV");
    std::string bn_sizes, bn_csv;
    unsigned bn_runs = 3, bn_bits = 1024;
    std::size_t bn_width = 0;
    bench_cmd->add_option("--sizes", bn_sizes,
                          "comma list like 100K+200x200,4096")->required();
    bench_cmd->add_option("--out-csv", bn_csv, "also write the CSV here");
    bench_cmd->add_option("--runs", bn_runs, "measurements per quantity (>=3)")
        ->capture_default_str();
    bench_cmd->add_option("--bits", bn_bits, "key size")->capture_default_str();
    bench_cmd->add_option("--chunk-width", bn_width,
                          "digits per chunk (default: widest for the key)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (keygen->parsed()) return cmd_keygen(kg_bits, kg_out, seed);
        if (encrypt->parsed())
            return cmd_encrypt(en_key, en_text, en_image, en_out, en_width,
                               en_b, en_x0, seed);
        if (decrypt->parsed())
            return cmd_decrypt(de_key, de_in, de_text, de_image);
        if (chain_cmd->parsed()) {
            if (ch_init->parsed()) {
                chain::Chain::create(ch_path);
                std::cout << "created " << ch_path << "\n";
                return 0;
            }
            if (ch_append->parsed())
                return cmd_chain_append(ch_path, ch_container, ch_timestamp);
            if (ch_get->parsed())
                return cmd_chain_get(ch_path, ch_index, ch_out);
            if (ch_verify->parsed()) return cmd_chain_verify(ch_path);
            if (ch_log->parsed()) return cmd_chain_log(ch_path, ch_log_index);
        }
        if (demo->parsed()) return cmd_demo(seed, demo_bits, demo_dir);
        if (bench_cmd->parsed())
            return cmd_bench(bn_sizes, bn_csv, seed, bn_runs, bn_bits,
                             bn_width);
    } catch (const Error& e) {
        std::cerr << "error (" << error_kind_name(e.kind()) << "): "
                  << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
