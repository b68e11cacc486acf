#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <string>

#if defined(__x86_64__) && defined(__GNUC__)
#include <immintrin.h>
#define MEDGUARD_SHA_NI_DISPATCH 1
#endif

#include "medguard/util/hex.hpp"

namespace medguard {

namespace detail {

alignas(16) inline constexpr std::uint32_t kSha256RoundK[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t v, int k) { return (v >> k) | (v << (32 - k)); }

inline void sha256_compress_portable(std::uint32_t state[8], const std::uint8_t* block) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
        w[i] = static_cast<std::uint32_t>(block[4 * i]) << 24 |
               static_cast<std::uint32_t>(block[4 * i + 1]) << 16 |
               static_cast<std::uint32_t>(block[4 * i + 2]) << 8 |
               static_cast<std::uint32_t>(block[4 * i + 3]);
    }
    for (int i = 16; i < 64; ++i) {
        const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }

    std::uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
    std::uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
    for (int i = 0; i < 64; ++i) {
        const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        const std::uint32_t ch = (e & f) ^ (~e & g);
        const std::uint32_t t1 = h + s1 + ch + kSha256RoundK[i] + w[i];
        const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const std::uint32_t t2 = s0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state[0] += a;
    state[1] += b;
    state[2] += c;
    state[3] += d;
    state[4] += e;
    state[5] += f;
    state[6] += g;
    state[7] += h;
}

#ifdef MEDGUARD_SHA_NI_DISPATCH
// SHA-NI compression; produces identical state transitions to the portable
// path (checked in the unit suite).
__attribute__((target("sha,sse4.1"))) inline void sha256_compress_ni(std::uint32_t state[8],
                                                                     const std::uint8_t* data) {
    const __m128i byte_order = _mm_set_epi64x(0x0c0d0e0f08090a0bULL, 0x0405060700010203ULL);
    __m128i tmp = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&state[0]));
    __m128i st1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&state[4]));
    tmp = _mm_shuffle_epi32(tmp, 0xB1);
    st1 = _mm_shuffle_epi32(st1, 0x1B);
    __m128i st0 = _mm_alignr_epi8(tmp, st1, 8);
    st1 = _mm_blend_epi16(st1, tmp, 0xF0);
    const __m128i abef_save = st0;
    const __m128i cdgh_save = st1;

    __m128i m[4];
    for (int g = 0; g < 4; ++g)
        m[g] = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(data + 16 * g)),
                                byte_order);

    for (int g = 0; g < 16; ++g) {
        __m128i msg =
            _mm_add_epi32(m[g % 4], _mm_load_si128(reinterpret_cast<const __m128i*>(&kSha256RoundK[4 * g])));
        st1 = _mm_sha256rnds2_epu32(st1, st0, msg);
        if (g >= 3 && g < 15) {
            const __m128i t = _mm_alignr_epi8(m[g % 4], m[(g + 3) % 4], 4);
            m[(g + 1) % 4] = _mm_add_epi32(m[(g + 1) % 4], t);
            m[(g + 1) % 4] = _mm_sha256msg2_epu32(m[(g + 1) % 4], m[g % 4]);
        }
        msg = _mm_shuffle_epi32(msg, 0x0E);
        st0 = _mm_sha256rnds2_epu32(st0, st1, msg);
        if (g >= 1 && g < 13) m[(g + 3) % 4] = _mm_sha256msg1_epu32(m[(g + 3) % 4], m[g % 4]);
    }

    st0 = _mm_add_epi32(st0, abef_save);
    st1 = _mm_add_epi32(st1, cdgh_save);
    tmp = _mm_shuffle_epi32(st0, 0x1B);
    st1 = _mm_shuffle_epi32(st1, 0xB1);
    st0 = _mm_blend_epi16(tmp, st1, 0xF0);
    st1 = _mm_alignr_epi8(st1, tmp, 8);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(&state[0]), st0);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(&state[4]), st1);
}

inline bool sha_ni_available() {
    static const bool available = __builtin_cpu_supports("sha");
    return available;
}
#endif

inline void sha256_compress(std::uint32_t state[8], const std::uint8_t* block) {
#ifdef MEDGUARD_SHA_NI_DISPATCH
    if (sha_ni_available()) {
        sha256_compress_ni(state, block);
        return;
    }
#endif
    sha256_compress_portable(state, block);
}

}  // namespace detail

// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
    static constexpr std::size_t kDigestSize = 32;
    using Digest = std::array<std::uint8_t, kDigestSize>;

    Sha256() { reset(); }

    void reset() {
        state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                  0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
        total_len_ = 0;
        buffer_len_ = 0;
    }

    void update(const std::uint8_t* data, std::size_t len) {
        total_len_ += len;
        if (buffer_len_ > 0) {
            const std::size_t take = std::min(len, std::size_t{64} - buffer_len_);
            std::memcpy(buffer_ + buffer_len_, data, take);
            buffer_len_ += take;
            data += take;
            len -= take;
            if (buffer_len_ == 64) {
                detail::sha256_compress(state_.data(), buffer_);
                buffer_len_ = 0;
            }
        }
        while (len >= 64) {
            detail::sha256_compress(state_.data(), data);
            data += 64;
            len -= 64;
        }
        if (len > 0) {
            std::memcpy(buffer_, data, len);
            buffer_len_ = len;
        }
    }

    void update(const Bytes& b) { update(b.data(), b.size()); }
    void update(const std::string& s) { update(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()); }

    Digest finish() {
        const std::uint64_t bit_len = total_len_ * 8;
        const std::uint8_t pad_byte = 0x80;
        update(&pad_byte, 1);
        static constexpr std::uint8_t zeros[64] = {};
        while (buffer_len_ != 56) update(zeros, buffer_len_ < 56 ? 56 - buffer_len_ : 64 - buffer_len_ + 56);
        std::uint8_t len_bytes[8];
        for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<std::uint8_t>(bit_len >> (56 - 8 * i));
        update(len_bytes, 8);
        Digest out;
        for (int i = 0; i < 8; ++i) {
            out[4 * i + 0] = static_cast<std::uint8_t>(state_[i] >> 24);
            out[4 * i + 1] = static_cast<std::uint8_t>(state_[i] >> 16);
            out[4 * i + 2] = static_cast<std::uint8_t>(state_[i] >> 8);
            out[4 * i + 3] = static_cast<std::uint8_t>(state_[i]);
        }
        reset();
        return out;
    }

    static Digest hash(const std::uint8_t* data, std::size_t len) {
        Sha256 h;
        h.update(data, len);
        return h.finish();
    }

    static Digest hash(const Bytes& b) { return hash(b.data(), b.size()); }
    static Digest hash(const std::string& s) {
        return hash(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
    }

private:
    std::array<std::uint32_t, 8> state_{};
    std::uint64_t total_len_ = 0;
    std::uint8_t buffer_[64]{};
    std::size_t buffer_len_ = 0;
};

inline std::string sha256_hex(const Bytes& b) { return to_hex(Sha256::hash(b).data(), 32); }
inline std::string sha256_hex(const std::string& s) { return to_hex(Sha256::hash(s).data(), 32); }

}  // namespace medguard
