#include "medchain/bench.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>

#include "medchain/chainstore.hpp"
#include "medchain/errors.hpp"
#include "medchain/pipeline.hpp"

namespace medchain::bench {

namespace {

std::size_t parse_byte_count(const std::string& text) {
    if (text.empty())
        throw Error(ErrorKind::Parameter, "bench: empty size spec");
    std::size_t multiplier = 1;
    std::string digits = text;
    char suffix = static_cast<char>(std::toupper(digits.back()));
    if (suffix == 'K' || suffix == 'M') {
        multiplier = suffix == 'K' ? 1024 : 1024 * 1024;
        digits.pop_back();
    }
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos)
        throw Error(ErrorKind::Parameter,
                    "bench: malformed size '" + text + "'");
    return std::stoull(digits) * multiplier;
}

double median_ms(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    std::size_t mid = samples.size() / 2;
    if (samples.size() % 2 == 1) return samples[mid];
    return (samples[mid - 1] + samples[mid]) / 2.0;
}

template <typename F>
double time_ms(F&& body) {
    auto start = std::chrono::steady_clock::now();
    body();
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

SizeSpec parse_size_spec(const std::string& spec) {
    SizeSpec out;
    out.label = spec;
    std::string text_part = spec;
    auto plus = spec.find('+');
    if (plus != std::string::npos) {
        text_part = spec.substr(0, plus);
        std::string image_part = spec.substr(plus + 1);
        auto x = image_part.find('x');
        if (x == std::string::npos)
            throw Error(ErrorKind::Parameter,
                        "bench: image spec must look like 200x200");
        std::string w = image_part.substr(0, x);
        std::string h = image_part.substr(x + 1);
        if (w.empty() || h.empty() ||
            w.find_first_not_of("0123456789") != std::string::npos ||
            h.find_first_not_of("0123456789") != std::string::npos)
            throw Error(ErrorKind::Parameter,
                        "bench: malformed image spec '" + image_part + "'");
        out.image_dims = {std::stoull(w), std::stoull(h)};
        if (out.image_dims->first == 0 || out.image_dims->second == 0)
            throw Error(ErrorKind::Parameter,
                        "bench: image dimensions must be >= 1");
    }
    out.text_bytes = parse_byte_count(text_part);
    return out;
}

BenchRecord run_bench(const SizeSpec& spec, const elgamal::KeyPair& keys,
                      const dna::DnaParams& dna_params,
                      std::size_t chunk_width, Rng& rng,
                      const std::filesystem::path& scratch_dir,
                      unsigned runs) {
    if (runs < 3)
        throw Error(ErrorKind::Parameter, "bench: need at least 3 runs");

    std::size_t image_bytes =
        spec.image_dims ? 3 * spec.image_dims->first * spec.image_dims->second
                        : 0;
    std::size_t plain_bytes = spec.text_bytes + image_bytes;
    if (plain_bytes == 0)
        throw Error(ErrorKind::Parameter, "bench: zero-size payload refused");
    if (plain_bytes > kPlainByteCap)
        throw Error(ErrorKind::Parameter,
                    "bench: payload exceeds the configured cap of " +
                        std::to_string(kPlainByteCap) + " bytes");

    emr::EmrPayload payload;
    payload.text.resize(spec.text_bytes);
    rng.fill_bytes(payload.text);
    if (spec.image_dims) {
        emr::RasterImage image;
        image.width = spec.image_dims->first;
        image.height = spec.image_dims->second;
        image.rgb.resize(image_bytes);
        rng.fill_bytes(image.rgb);
        payload.image = std::move(image);
    }

    BenchRecord record;
    record.label = spec.label;
    record.plain_bytes = plain_bytes;

    pipeline::EncryptedEmr enc;
    std::vector<double> encrypt_samples, decrypt_samples, append_samples;
    for (unsigned i = 0; i < runs; ++i) {
        encrypt_samples.push_back(time_ms([&] {
            enc = pipeline::encrypt_emr(payload, keys.pub, dna_params,
                                        chunk_width, rng);
        }));
    }
    record.cipher_bytes = pipeline::serialize_container(enc).size();
    record.expansion_ratio =
        static_cast<double>(record.cipher_bytes) / static_cast<double>(plain_bytes);

    emr::EmrPayload decrypted;
    for (unsigned i = 0; i < runs; ++i) {
        decrypt_samples.push_back(time_ms([&] {
            decrypted = pipeline::decrypt_emr(enc, keys.priv);
        }));
    }
    if (decrypted != payload)
        throw Error(ErrorKind::Corruption, "bench: round trip mismatch");

    // Block creation, timed over prepared transactions so the measurement
    // excludes encryption.
    std::vector<chain::Transaction> txs;
    std::string envelope_bytes = pipeline::serialize_envelope(enc.envelope);
    txs.push_back({{envelope_bytes.begin(), envelope_bytes.end()}});
    for (const std::string& chunk : pipeline::payload_chunks(enc))
        txs.push_back({{chunk.begin(), chunk.end()}});
    std::filesystem::create_directories(scratch_dir);
    std::filesystem::path chain_path =
        scratch_dir / ("bench-chain-" + std::to_string(rng.next_u64()) + ".blk");
    chain::Chain store = chain::Chain::create(chain_path);
    std::int64_t timestamp = 1700000000;
    for (unsigned i = 0; i < runs; ++i) {
        append_samples.push_back(
            time_ms([&] { store.append(txs, timestamp + i); }));
    }
    std::filesystem::remove(chain_path);
    std::filesystem::remove(chain_path.string() + ".tip");

    record.encrypt_ms = median_ms(encrypt_samples);
    record.decrypt_ms = median_ms(decrypt_samples);
    record.enc_dec_ratio = record.encrypt_ms / record.decrypt_ms;
    record.block_create_ms = median_ms(append_samples);
    return record;
}

std::string csv_header() {
    return "label,plain_bytes,cipher_bytes,expansion_ratio,encrypt_ms,"
           "decrypt_ms,enc_dec_ratio,block_create_ms";
}

std::string csv_row(const BenchRecord& record) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    out << record.label << ',' << record.plain_bytes << ','
        << record.cipher_bytes << ',' << record.expansion_ratio << ','
        << record.encrypt_ms << ',' << record.decrypt_ms << ','
        << record.enc_dec_ratio << ',' << record.block_create_ms;
    return out.str();
}

}  // namespace medchain::bench
