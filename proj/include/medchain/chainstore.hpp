#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "medchain/sha256.hpp"

namespace medchain::chain {

struct Transaction {
    std::vector<std::uint8_t> data;  // nonempty
};

/// Canonical serialization: index, prev_hash, merkle_root, timestamp,
/// tx_count, nonce as fixed-width big-endian fields (8, 32, 32, 8, 4, 8
/// bytes). block_hash is SHA-256 over these 92 bytes.
struct BlockHeader {
    std::uint64_t index = 0;
    Digest prev_hash{};
    Digest merkle_root{};
    std::int64_t timestamp = 0;
    std::uint32_t tx_count = 0;
    std::uint64_t nonce = 0;  // field exists in the header; always 0 here
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> body;
};

struct AccessRecord {
    std::int64_t timestamp = 0;
    std::uint64_t index = 0;
    std::string pseudonym;
};

inline constexpr std::size_t kHeaderBytes = 92;

/// Binary SHA-256 hash tree: leaf hash H_i = SHA-256(D_i), parent =
/// SHA-256(left ++ right), an odd node at any level pairs with itself,
/// a single leaf hashes to H(leaf). At least one leaf required.
Digest merkle_root(const std::vector<std::vector<std::uint8_t>>& leaves);

std::vector<std::uint8_t> serialize_header(const BlockHeader& header);
Digest block_hash(const BlockHeader& header);

/// Append-only hash-chained store. One record per block in `<path>`:
/// 4-byte big-endian record length, canonical header bytes, then
/// length-prefixed transactions (4-byte big-endian each). `<path>.tip`
/// carries the committed file length and the tip block hash and is replaced
/// atomically after the record is flushed, so an interrupted append leaves
/// the previous chain intact. Access records live in `<path>.access`.
///
/// get() and verify() always re-read the file, so tampering after open is
/// still caught. Appends require a single writer; reads do not touch
/// mutable state and may run concurrently.
class Chain {
public:
    /// Creates an empty chain; fails if one already exists at the path.
    static Chain create(const std::filesystem::path& path);

    /// Opens and fully verifies an existing chain.
    static Chain open(const std::filesystem::path& path);

    /// Appends a block over the given transactions and returns its index.
    std::uint64_t append(const std::vector<Transaction>& txs,
                         std::int64_t timestamp);

    /// Reads one block back from disk, re-verifying its Merkle root and its
    /// link into the chain.
    Block get(std::uint64_t index) const;

    /// Re-reads the whole file; returns the first bad block index, or
    /// nullopt when the chain verifies.
    std::optional<std::uint64_t> verify() const;

    std::uint64_t size() const { return static_cast<std::uint64_t>(headers_.size()); }
    const std::filesystem::path& path() const { return path_; }

    void log_access(std::uint64_t index, const std::string& pseudonym,
                    std::int64_t timestamp);
    std::vector<AccessRecord> access_log(
        std::optional<std::uint64_t> index = std::nullopt) const;

private:
    Chain() = default;

    std::filesystem::path path_;
    std::filesystem::path tip_path_;
    std::filesystem::path access_path_;
    std::uint64_t committed_length_ = 0;
    Digest tip_hash_{};  // zero digest for an empty chain
    std::vector<BlockHeader> headers_;
    std::vector<std::uint64_t> offsets_;  // record start (length prefix) per block
};

}  // namespace medchain::chain
