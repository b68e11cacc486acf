#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medguard/crypto/hmac.hpp"
#include "medguard/crypto/sha256.hpp"
#include "medguard/ledger/request.hpp"

namespace medguard {

// Outcome byte values; kept as raw integers so every serialized byte
// pattern parses and tampering is always left for verify_chain to flag.
constexpr std::uint8_t kBlockAccepted = 1;
constexpr std::uint8_t kBlockRejected = 2;

// Stage/reason codes recorded in blocks and decisions.
enum class DecisionReason : std::uint8_t {
    none = 0,
    bad_tag = 1,
    replay = 2,
    unknown_device = 3,
    malformed_payload = 4,
    recognized_attack_pattern = 5,
    recognized_benign_pattern = 6,
    classifier_attack = 7,
    classifier_benign = 8,
};

inline const char* to_string(DecisionReason r) {
    switch (r) {
        case DecisionReason::none: return "none";
        case DecisionReason::bad_tag: return "bad_tag";
        case DecisionReason::replay: return "replay";
        case DecisionReason::unknown_device: return "unknown_device";
        case DecisionReason::malformed_payload: return "malformed_payload";
        case DecisionReason::recognized_attack_pattern: return "recognized_attack_pattern";
        case DecisionReason::recognized_benign_pattern: return "recognized_benign_pattern";
        case DecisionReason::classifier_attack: return "classifier_attack";
        default: return "classifier_benign";
    }
}

// Fixed 147-byte block layout:
//   index u64 | timestamp u64 | prev_hash 32 | payload_hash 32 |
//   verdict u8 | reason u8 | sig_present u8 | accept_sig 32 | block_hash 32
// block_hash covers bytes [0,115); the acceptance counter-signature covers
// bytes [0,82) and is present only on accepted blocks of a signing ledger.
struct Block {
    std::uint64_t index = 0;
    std::int64_t timestamp_ms = 0;
    Sha256::Digest prev_hash{};
    Sha256::Digest payload_hash{};
    std::uint8_t verdict = kBlockRejected;
    std::uint8_t reason = 0;
    std::uint8_t sig_present = 0;  // raw byte so non-canonical encodings stay visible to the hash
    Sha256::Digest accept_sig{};
    Sha256::Digest block_hash{};

    bool has_accept_sig() const { return sig_present != 0; }
};

constexpr std::size_t kBlockBytes = 147;
constexpr std::size_t kBlockHashedBytes = 115;
constexpr std::size_t kBlockSignedBytes = 82;

inline void serialize_block_into(const Block& b, std::uint8_t out[kBlockBytes]) {
    std::size_t pos = 0;
    const auto u64 = [&](std::uint64_t v) {
        for (int i = 7; i >= 0; --i) out[pos++] = static_cast<std::uint8_t>(v >> (8 * i));
    };
    const auto digest = [&](const Sha256::Digest& d) {
        std::memcpy(out + pos, d.data(), d.size());
        pos += d.size();
    };
    u64(b.index);
    u64(static_cast<std::uint64_t>(b.timestamp_ms));
    digest(b.prev_hash);
    digest(b.payload_hash);
    out[pos++] = b.verdict;
    out[pos++] = b.reason;
    out[pos++] = b.sig_present;
    digest(b.accept_sig);
    digest(b.block_hash);
}

inline Bytes serialize_block(const Block& b) {
    Bytes out(kBlockBytes);
    serialize_block_into(b, out.data());
    return out;
}

// Total over every 147-byte string: any byte pattern yields a Block, and
// integrity questions stay with verify_chain.
inline Block parse_block(const Bytes& bytes) {
    if (bytes.size() != kBlockBytes)
        throw std::runtime_error("block serialization must be exactly " + std::to_string(kBlockBytes) +
                                 " bytes");
    Block b;
    std::size_t pos = 0;
    const auto u64 = [&]() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | bytes[pos++];
        return v;
    };
    const auto digest = [&]() {
        Sha256::Digest d;
        std::copy(bytes.begin() + static_cast<long>(pos), bytes.begin() + static_cast<long>(pos) + 32,
                  d.begin());
        pos += 32;
        return d;
    };
    b.index = u64();
    b.timestamp_ms = static_cast<std::int64_t>(u64());
    b.prev_hash = digest();
    b.payload_hash = digest();
    b.verdict = bytes[pos++];
    b.reason = bytes[pos++];
    b.sig_present = bytes[pos++];
    b.accept_sig = digest();
    b.block_hash = digest();
    return b;
}

inline Sha256::Digest compute_block_hash(const Block& b) {
    std::uint8_t bytes[kBlockBytes];
    serialize_block_into(b, bytes);
    return Sha256::hash(bytes, kBlockHashedBytes);
}

inline Sha256::Digest compute_accept_signature(const Block& b, const Bytes& signer_key) {
    std::uint8_t bytes[kBlockBytes];
    serialize_block_into(b, bytes);
    return hmac_sha256(signer_key, bytes, kBlockSignedBytes);
}

enum class ChainFault { hash_mismatch, link_mismatch, index_gap };

inline const char* to_string(ChainFault f) {
    switch (f) {
        case ChainFault::hash_mismatch: return "hash_mismatch";
        case ChainFault::link_mismatch: return "link_mismatch";
        default: return "index_gap";
    }
}

struct ChainStatus {
    bool ok = true;
    std::size_t broken_at = 0;
    ChainFault cause = ChainFault::hash_mismatch;
};

// Single-node append-only hash chain. Every handled request becomes exactly
// one block; accepted blocks additionally carry the agent's HMAC
// counter-signature when the ledger holds a signing key.
class Ledger {
public:
    explicit Ledger(std::optional<Bytes> signer_key = std::nullopt) : signer_key_(std::move(signer_key)) {
        blocks_.push_back(genesis());
    }

    static Block genesis() {
        Block g;
        g.index = 0;
        g.timestamp_ms = 0;
        g.prev_hash.fill(0);
        g.payload_hash = Sha256::hash(Bytes{});
        g.verdict = kBlockAccepted;
        g.reason = static_cast<std::uint8_t>(DecisionReason::none);
        g.block_hash = compute_block_hash(g);
        return g;
    }

    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    const Block& tip() const { return blocks_.back(); }

    Block& mutable_block(std::size_t i) { return blocks_.at(i); }  // for tamper tests and import

    const Block& append(const SignedRequest& req, std::uint8_t verdict, DecisionReason reason,
                        const Clock& clock) {
        return append_payload_hash(Sha256::hash(canonical_request(req)), verdict, reason, clock);
    }

    const Block& append_payload_hash(const Sha256::Digest& payload_hash, std::uint8_t verdict,
                                     DecisionReason reason, const Clock& clock) {
        const Block& current_tip = blocks_.back();
        if (compute_block_hash(current_tip) != current_tip.block_hash)
            throw std::runtime_error("chain invalid, refusing append");

        Block b;
        b.index = current_tip.index + 1;
        b.timestamp_ms = clock();
        b.prev_hash = current_tip.block_hash;
        b.payload_hash = payload_hash;
        b.verdict = verdict;
        b.reason = static_cast<std::uint8_t>(reason);
        if (verdict == kBlockAccepted && signer_key_) {
            b.sig_present = 1;
            b.accept_sig = compute_accept_signature(b, *signer_key_);
        }
        b.block_hash = compute_block_hash(b);
        blocks_.push_back(b);
        return blocks_.back();
    }

    // Full scan; reports the first violation.
    ChainStatus verify_chain() const {
        static const Sha256::Digest zero{};
        for (std::size_t j = 0; j < blocks_.size(); ++j) {
            const Block& b = blocks_[j];
            if (b.index != j) return {false, j, ChainFault::index_gap};
            const Sha256::Digest& expected_prev = j == 0 ? zero : blocks_[j - 1].block_hash;
            if (b.prev_hash != expected_prev) return {false, j, ChainFault::link_mismatch};
            if (compute_block_hash(b) != b.block_hash) return {false, j, ChainFault::hash_mismatch};
        }
        return {};
    }

    void replace_blocks(std::vector<Block> blocks) { blocks_ = std::move(blocks); }

private:
    std::vector<Block> blocks_;
    std::optional<Bytes> signer_key_;
};

// JSON-lines persistence: one block per line, hashes hex-encoded.
inline nlohmann::json block_to_json(const Block& b) {
    nlohmann::json j;
    j["index"] = b.index;
    j["timestamp_ms"] = b.timestamp_ms;
    j["prev_hash"] = to_hex(b.prev_hash);
    j["payload_hash"] = to_hex(b.payload_hash);
    j["verdict"] = b.verdict == kBlockAccepted ? "accepted" : "rejected";
    j["reason"] = to_string(static_cast<DecisionReason>(b.reason));
    j["accept_sig"] = b.has_accept_sig() ? nlohmann::json(to_hex(b.accept_sig)) : nlohmann::json(nullptr);
    j["block_hash"] = to_hex(b.block_hash);
    return j;
}

inline Block block_from_json(const nlohmann::json& j) {
    Block b;
    b.index = j.at("index").get<std::uint64_t>();
    b.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    const auto digest = [&](const char* key) {
        const Bytes raw = from_hex(j.at(key).get<std::string>());
        if (raw.size() != 32) throw std::runtime_error(std::string("ledger file: field ") + key + " is not 32 bytes");
        Sha256::Digest d;
        std::copy(raw.begin(), raw.end(), d.begin());
        return d;
    };
    b.prev_hash = digest("prev_hash");
    b.payload_hash = digest("payload_hash");
    const std::string verdict = j.at("verdict").get<std::string>();
    b.verdict = verdict == "accepted" ? kBlockAccepted : kBlockRejected;
    const std::string reason = j.at("reason").get<std::string>();
    for (int r = 0; r <= 8; ++r)
        if (reason == to_string(static_cast<DecisionReason>(r))) b.reason = static_cast<std::uint8_t>(r);
    if (!j.at("accept_sig").is_null()) {
        b.sig_present = 1;
        b.accept_sig = digest("accept_sig");
    }
    b.block_hash = digest("block_hash");
    return b;
}

inline std::string ledger_to_jsonl(const Ledger& ledger) {
    std::string out;
    for (const auto& b : ledger.blocks()) out += block_to_json(b).dump() + "\n";
    return out;
}

inline Ledger ledger_from_jsonl(const std::string& text) {
    std::vector<Block> blocks;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(start, end - start);
        if (!line.empty()) blocks.push_back(block_from_json(nlohmann::json::parse(line)));
        start = end + 1;
    }
    if (blocks.empty()) throw std::runtime_error("ledger file contains no blocks");
    Ledger ledger;
    ledger.replace_blocks(std::move(blocks));
    return ledger;
}

}  // namespace medguard
