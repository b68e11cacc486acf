#pragma once

#include <cstdint>

#include "medguard/crypto/sha256.hpp"

namespace medguard {

// HMAC-SHA-256 (RFC 2104).
inline Sha256::Digest hmac_sha256(const Bytes& key, const std::uint8_t* msg, std::size_t len) {
    std::array<std::uint8_t, 64> block{};
    if (key.size() > 64) {
        const auto digest = Sha256::hash(key);
        std::memcpy(block.data(), digest.data(), digest.size());
    } else {
        std::memcpy(block.data(), key.data(), key.size());
    }

    std::array<std::uint8_t, 64> ipad;
    std::array<std::uint8_t, 64> opad;
    for (int i = 0; i < 64; ++i) {
        ipad[i] = static_cast<std::uint8_t>(block[i] ^ 0x36);
        opad[i] = static_cast<std::uint8_t>(block[i] ^ 0x5c);
    }

    Sha256 inner;
    inner.update(ipad.data(), ipad.size());
    inner.update(msg, len);
    const auto inner_digest = inner.finish();

    Sha256 outer;
    outer.update(opad.data(), opad.size());
    outer.update(inner_digest.data(), inner_digest.size());
    return outer.finish();
}

inline Sha256::Digest hmac_sha256(const Bytes& key, const Bytes& msg) {
    return hmac_sha256(key, msg.data(), msg.size());
}

// Constant-time digest comparison.
inline bool digest_equal(const Sha256::Digest& a, const Sha256::Digest& b) {
    std::uint8_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<std::uint8_t>(a[i] ^ b[i]);
    return diff == 0;
}

}  // namespace medguard
