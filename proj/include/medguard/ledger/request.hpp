#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "medguard/crypto/hmac.hpp"
#include "medguard/ledger/encoding.hpp"
#include "medguard/util/rng.hpp"

namespace medguard {

// Milliseconds-since-epoch source; tests and the simulator substitute a
// deterministic one.
using Clock = std::function<std::int64_t()>;

inline Clock logical_clock(std::int64_t start_ms = 0, std::int64_t step_ms = 1) {
    auto next = std::make_shared<std::int64_t>(start_ms);
    return [next, step_ms]() {
        const std::int64_t now = *next;
        *next += step_ms;
        return now;
    };
}

// Pre-shared 32-byte secrets established at enrollment. Keys never leave
// this table; blocks only ever carry hashes and tags.
class DeviceRegistry {
public:
    void enroll(const std::string& device_id, Rng& rng) {
        Bytes key(32);
        for (auto& b : key) b = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
        keys_[device_id] = std::move(key);
    }

    void enroll_with_key(const std::string& device_id, Bytes key) { keys_[device_id] = std::move(key); }

    bool known(const std::string& device_id) const { return keys_.count(device_id) > 0; }

    const Bytes& key_of(const std::string& device_id) const {
        auto it = keys_.find(device_id);
        if (it == keys_.end()) throw std::runtime_error("device not enrolled: " + device_id);
        return it->second;
    }

    std::size_t size() const { return keys_.size(); }

private:
    std::map<std::string, Bytes> keys_;
};

using Nonce = std::array<std::uint8_t, 16>;

struct SignedRequest {
    std::string device_id;
    Nonce nonce{};
    std::int64_t timestamp_ms = 0;
    Bytes payload;
    Sha256::Digest tag{};  // HMAC-SHA-256 over the preceding fields
};

// MAC input: every field except the tag itself.
inline Bytes canonical_unsigned(const SignedRequest& req) {
    Bytes out;
    put_field(out, req.device_id);
    put_field(out, req.nonce.data(), req.nonce.size());
    put_u64(out, static_cast<std::uint64_t>(req.timestamp_ms));
    put_field(out, req.payload);
    return out;
}

// Full envelope, the input to the ledger's payload hash.
inline Bytes canonical_request(const SignedRequest& req) {
    Bytes out = canonical_unsigned(req);
    put_field(out, req.tag.data(), req.tag.size());
    return out;
}

inline SignedRequest sign_request(const DeviceRegistry& registry, const std::string& device_id,
                                  Bytes payload, Rng& rng, const Clock& clock) {
    const Bytes& key = registry.key_of(device_id);
    SignedRequest req;
    req.device_id = device_id;
    for (auto& b : req.nonce) b = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
    req.timestamp_ms = clock();
    req.payload = std::move(payload);
    const Bytes msg = canonical_unsigned(req);
    req.tag = hmac_sha256(key, msg);
    return req;
}

enum class RequestVerdict { valid, bad_tag, replay, unknown_device };

inline const char* to_string(RequestVerdict v) {
    switch (v) {
        case RequestVerdict::valid: return "valid";
        case RequestVerdict::bad_tag: return "bad_tag";
        case RequestVerdict::replay: return "replay";
        default: return "unknown_device";
    }
}

// Nonces already observed, keyed per device.
class SeenNonces {
public:
    bool seen(const SignedRequest& req) const { return set_.count({req.device_id, req.nonce}) > 0; }
    void record(const SignedRequest& req) { set_.insert({req.device_id, req.nonce}); }
    std::size_t size() const { return set_.size(); }

private:
    std::set<std::pair<std::string, Nonce>> set_;
};

// Pure check: recompute the tag, then test nonce freshness. Does not record
// the nonce; callers do that once the request has been handled.
inline RequestVerdict verify_request(const DeviceRegistry& registry, const SignedRequest& req,
                                     const SeenNonces& seen) {
    if (!registry.known(req.device_id)) return RequestVerdict::unknown_device;
    const auto expected = hmac_sha256(registry.key_of(req.device_id), canonical_unsigned(req));
    if (!digest_equal(expected, req.tag)) return RequestVerdict::bad_tag;
    if (seen.seen(req)) return RequestVerdict::replay;
    return RequestVerdict::valid;
}

}  // namespace medguard
