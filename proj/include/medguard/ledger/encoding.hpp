#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "medguard/util/hex.hpp"

namespace medguard {

// Canonical wire encoding: big-endian fixed-width integers and
// length-prefixed variable fields, concatenated in declared field order.
// Required for bit-exact hashes across platforms.

inline void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_field(Bytes& out, const std::uint8_t* data, std::size_t len) {
    put_u32(out, static_cast<std::uint32_t>(len));
    out.insert(out.end(), data, data + len);
}

inline void put_field(Bytes& out, const Bytes& b) { put_field(out, b.data(), b.size()); }

inline void put_field(Bytes& out, const std::string& s) {
    put_field(out, reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

class ByteReader {
public:
    explicit ByteReader(const Bytes& b) : data_(b) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_++];
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | data_[pos_++];
        return v;
    }

    Bytes field() {
        const std::uint32_t len = u32();
        need(len);
        Bytes out(data_.begin() + static_cast<long>(pos_), data_.begin() + static_cast<long>(pos_ + len));
        pos_ += len;
        return out;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw std::runtime_error("truncated canonical encoding");
    }

    const Bytes& data_;
    std::size_t pos_ = 0;
};

// Feature vectors travel as a count followed by IEEE-754 bit patterns.
inline Bytes encode_feature_vector(const std::vector<double>& features) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(features.size()));
    for (double v : features) put_u64(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

inline std::vector<double> decode_feature_vector(const Bytes& payload) {
    ByteReader reader(payload);
    const std::uint32_t count = reader.u32();
    if (payload.size() != 4 + std::size_t{count} * 8)
        throw std::runtime_error("malformed feature payload: length does not match count");
    std::vector<double> out(count);
    for (auto& v : out) v = std::bit_cast<double>(reader.u64());
    return out;
}

}  // namespace medguard
