#include "medchain/chainstore.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "medchain/errors.hpp"

namespace medchain::chain {

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes) {
    for (int i = bytes - 1; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t get_be(const std::uint8_t* in, int bytes) {
    std::uint64_t value = 0;
    for (int i = 0; i < bytes; ++i) value = (value << 8) | in[i];
    return value;
}

constexpr std::uint64_t kMaxRecordBytes = 1ull << 30;

Digest hash_pair(const Digest& left, const Digest& right) {
    std::vector<std::uint8_t> joined(left.begin(), left.end());
    joined.insert(joined.end(), right.begin(), right.end());
    return sha256(joined);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        bytes.insert(bytes.end(), buf, buf + in.gcount());
    return bytes;
}

struct TipState {
    std::uint64_t committed_length = 0;
    Digest tip_hash{};
};

TipState read_tip(const std::filesystem::path& tip_path) {
    std::ifstream in(tip_path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + tip_path.string());
    TipState tip;
    std::string length_line, tip_line;
    if (!std::getline(in, length_line) || !std::getline(in, tip_line) ||
        length_line.rfind("length=", 0) != 0 || tip_line.rfind("tip=", 0) != 0)
        throw Error(ErrorKind::Tamper, "chain: malformed tip file");
    std::string length_str = length_line.substr(7);
    std::string hex = tip_line.substr(4);
    if (length_str.empty() ||
        length_str.find_first_not_of("0123456789") != std::string::npos ||
        hex.size() != 64 ||
        hex.find_first_not_of("0123456789abcdef") != std::string::npos)
        throw Error(ErrorKind::Tamper, "chain: malformed tip file");
    tip.committed_length = std::stoull(length_str);
    for (std::size_t i = 0; i < 32; ++i) {
        auto nibble = [&](char c) {
            return c <= '9' ? c - '0' : c - 'a' + 10;
        };
        tip.tip_hash[i] = static_cast<std::uint8_t>(
            (nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return tip;
}

void write_tip(const std::filesystem::path& tip_path, const TipState& tip) {
    std::filesystem::path tmp = tip_path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string());
        out << "length=" << tip.committed_length << '\n'
            << "tip=" << hex_encode(tip.tip_hash) << '\n';
        if (!out.flush())
            throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, tip_path, ec);
    if (ec)
        throw Error(ErrorKind::Io,
                    "cannot replace " + tip_path.string() + ": " + ec.message());
}

BlockHeader parse_header(const std::uint8_t* bytes) {
    BlockHeader header;
    header.index = get_be(bytes, 8);
    std::memcpy(header.prev_hash.data(), bytes + 8, 32);
    std::memcpy(header.merkle_root.data(), bytes + 40, 32);
    header.timestamp = static_cast<std::int64_t>(get_be(bytes + 72, 8));
    header.tx_count = static_cast<std::uint32_t>(get_be(bytes + 80, 4));
    header.nonce = get_be(bytes + 84, 8);
    return header;
}

struct LoadedChain {
    std::vector<BlockHeader> headers;
    std::vector<std::uint64_t> offsets;
    std::vector<std::vector<Transaction>> bodies;
};

// Walks every committed record, re-deriving every hash. On the first
// violation returns the offending block index; on success fills `out`.
std::optional<std::uint64_t> load_and_check(
    const std::vector<std::uint8_t>& bytes, const TipState& tip,
    LoadedChain& out) {
    if (bytes.size() < tip.committed_length)
        return out.headers.size();  // file shorter than the committed chain

    std::uint64_t pos = 0;
    Digest prev{};
    while (pos < tip.committed_length) {
        std::uint64_t index = out.headers.size();
        if (tip.committed_length - pos < 4 + kHeaderBytes) return index;
        std::uint64_t record_len = get_be(bytes.data() + pos, 4);
        if (record_len < kHeaderBytes || record_len > kMaxRecordBytes ||
            tip.committed_length - pos - 4 < record_len)
            return index;
        std::uint64_t record_start = pos;
        pos += 4;
        BlockHeader header = parse_header(bytes.data() + pos);
        pos += kHeaderBytes;

        if (header.index != index) return index;
        if (header.nonce != 0) return index;
        if (header.prev_hash != prev) return index;
        if (header.tx_count == 0) return index;

        std::uint64_t body_end = record_start + 4 + record_len;
        std::vector<Transaction> body;
        std::vector<std::vector<std::uint8_t>> leaves;
        for (std::uint32_t t = 0; t < header.tx_count; ++t) {
            if (body_end - pos < 4) return index;
            std::uint64_t tx_len = get_be(bytes.data() + pos, 4);
            pos += 4;
            if (tx_len == 0 || body_end - pos < tx_len) return index;
            Transaction tx;
            tx.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                           bytes.begin() + static_cast<std::ptrdiff_t>(pos + tx_len));
            leaves.push_back(tx.data);
            body.push_back(std::move(tx));
            pos += tx_len;
        }
        if (pos != body_end) return index;  // tx section must fill the record
        if (merkle_root(leaves) != header.merkle_root) return index;

        prev = block_hash(header);
        out.offsets.push_back(record_start);
        out.headers.push_back(header);
        out.bodies.push_back(std::move(body));
    }
    if (prev != tip.tip_hash)
        return out.headers.empty() ? 0 : out.headers.size() - 1;
    return std::nullopt;
}

LoadedChain load_or_throw(const std::filesystem::path& path,
                          const TipState& tip) {
    LoadedChain loaded;
    if (auto bad = load_and_check(read_file(path), tip, loaded))
        throw Error(ErrorKind::Tamper,
                    "chain: verification failed at block " +
                        std::to_string(*bad));
    return loaded;
}

void append_and_sync(const std::filesystem::path& path,
                     const std::vector<std::uint8_t>& record) {
    int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (fd < 0) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::size_t written = 0;
    while (written < record.size()) {
        ssize_t n = ::write(fd, record.data() + written,
                            record.size() - written);
        if (n <= 0) {
            ::close(fd);
            throw Error(ErrorKind::Io, "cannot write " + path.string());
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd) != 0) {
        ::close(fd);
        throw Error(ErrorKind::Io, "cannot sync " + path.string());
    }
    ::close(fd);
}

}  // namespace

Digest merkle_root(const std::vector<std::vector<std::uint8_t>>& leaves) {
    if (leaves.empty())
        throw Error(ErrorKind::Domain, "merkle: at least one leaf required");
    std::vector<Digest> level;
    level.reserve(leaves.size());
    for (const auto& leaf : leaves) level.push_back(sha256(leaf));
    while (level.size() > 1) {
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            const Digest& left = level[i];
            const Digest& right =
                (i + 1 < level.size()) ? level[i + 1] : level[i];
            next.push_back(hash_pair(left, right));
        }
        level = std::move(next);
    }
    return level.front();
}

std::vector<std::uint8_t> serialize_header(const BlockHeader& header) {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes);
    put_be(out, header.index, 8);
    out.insert(out.end(), header.prev_hash.begin(), header.prev_hash.end());
    out.insert(out.end(), header.merkle_root.begin(), header.merkle_root.end());
    put_be(out, static_cast<std::uint64_t>(header.timestamp), 8);
    put_be(out, header.tx_count, 4);
    put_be(out, header.nonce, 8);
    return out;
}

Digest block_hash(const BlockHeader& header) {
    return sha256(serialize_header(header));
}

Chain Chain::create(const std::filesystem::path& path) {
    if (std::filesystem::exists(path))
        throw Error(ErrorKind::Io,
                    "chain: " + path.string() + " already exists");
    Chain chain;
    chain.path_ = path;
    chain.tip_path_ = path;
    chain.tip_path_ += ".tip";
    chain.access_path_ = path;
    chain.access_path_ += ".access";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot create " + path.string());
    out.close();
    write_tip(chain.tip_path_, TipState{});
    return chain;
}

Chain Chain::open(const std::filesystem::path& path) {
    Chain chain;
    chain.path_ = path;
    chain.tip_path_ = path;
    chain.tip_path_ += ".tip";
    chain.access_path_ = path;
    chain.access_path_ += ".access";
    TipState tip = read_tip(chain.tip_path_);
    LoadedChain loaded = load_or_throw(path, tip);
    chain.committed_length_ = tip.committed_length;
    chain.tip_hash_ = tip.tip_hash;
    chain.headers_ = std::move(loaded.headers);
    chain.offsets_ = std::move(loaded.offsets);
    return chain;
}

std::uint64_t Chain::append(const std::vector<Transaction>& txs,
                            std::int64_t timestamp) {
    if (txs.empty())
        throw Error(ErrorKind::Domain, "chain: a block needs >= 1 transaction");
    std::vector<std::vector<std::uint8_t>> leaves;
    leaves.reserve(txs.size());
    for (const auto& tx : txs) {
        if (tx.data.empty())
            throw Error(ErrorKind::Domain, "chain: empty transaction");
        leaves.push_back(tx.data);
    }

    BlockHeader header;
    header.index = size();
    header.prev_hash = tip_hash_;
    header.merkle_root = merkle_root(leaves);
    header.timestamp = timestamp;
    header.tx_count = static_cast<std::uint32_t>(txs.size());
    header.nonce = 0;

    std::uint64_t record_len = kHeaderBytes;
    for (const auto& tx : txs) record_len += 4 + tx.data.size();
    if (record_len > kMaxRecordBytes)
        throw Error(ErrorKind::Domain, "chain: block exceeds the record cap");

    std::vector<std::uint8_t> record;
    record.reserve(4 + record_len);
    put_be(record, record_len, 4);
    auto header_bytes = serialize_header(header);
    record.insert(record.end(), header_bytes.begin(), header_bytes.end());
    for (const auto& tx : txs) {
        put_be(record, tx.data.size(), 4);
        record.insert(record.end(), tx.data.begin(), tx.data.end());
    }

    // The record is durable before the tip moves; a crash in between leaves
    // the previous committed chain.
    append_and_sync(path_, record);
    TipState tip;
    tip.committed_length = committed_length_ + record.size();
    tip.tip_hash = block_hash(header);
    write_tip(tip_path_, tip);

    offsets_.push_back(committed_length_);
    committed_length_ = tip.committed_length;
    tip_hash_ = tip.tip_hash;
    headers_.push_back(header);
    return header.index;
}

Block Chain::get(std::uint64_t index) const {
    if (index >= size())
        throw Error(ErrorKind::Domain,
                    "chain: block index " + std::to_string(index) +
                        " out of range");
    TipState tip = read_tip(tip_path_);
    LoadedChain loaded = load_or_throw(path_, tip);
    if (index >= loaded.headers.size())
        throw Error(ErrorKind::Tamper,
                    "chain: block " + std::to_string(index) +
                        " missing from the persisted chain");
    Block block;
    block.header = loaded.headers[index];
    block.body = std::move(loaded.bodies[index]);
    return block;
}

std::optional<std::uint64_t> Chain::verify() const {
    TipState tip;
    try {
        tip = read_tip(tip_path_);
    } catch (const Error&) {
        return 0;
    }
    LoadedChain loaded;
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file(path_);
    } catch (const Error&) {
        return 0;
    }
    return load_and_check(bytes, tip, loaded);
}

void Chain::log_access(std::uint64_t index, const std::string& pseudonym,
                       std::int64_t timestamp) {
    if (index >= size())
        throw Error(ErrorKind::Domain,
                    "chain: block index " + std::to_string(index) +
                        " out of range");
    if (pseudonym.empty() ||
        pseudonym.find_first_of(" \t\r\n") != std::string::npos)
        throw Error(ErrorKind::Parameter,
                    "chain: pseudonym must be a nonempty token");
    std::ofstream out(access_path_, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + access_path_.string());
    out << timestamp << ' ' << index << ' ' << pseudonym << '\n';
    if (!out.flush())
        throw Error(ErrorKind::Io, "cannot write " + access_path_.string());
}

std::vector<AccessRecord> Chain::access_log(
    std::optional<std::uint64_t> index) const {
    std::vector<AccessRecord> records;
    std::ifstream in(access_path_);
    if (!in) return records;  // no accesses yet
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        AccessRecord record;
        if (!(fields >> record.timestamp >> record.index >> record.pseudonym))
            throw Error(ErrorKind::Corruption, "chain: malformed access log");
        if (!index || record.index == *index) records.push_back(record);
    }
    return records;
}

}  // namespace medchain::chain
