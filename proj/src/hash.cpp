#include "l2fe/hash.hpp"

#include "l2fe/errors.hpp"
#include "l2fe/rng.hpp"

#include <openssl/hmac.h>

#include <cmath>
#include <cstring>

namespace l2fe {

Bytes hmac_sha256(const Bytes& key, const Bytes& data) {
    Bytes digest(32);
    unsigned int len = 0;
    const unsigned char* ok = HMAC(
        EVP_sha256(), key.data(), static_cast<int>(key.size()),
        data.empty() ? reinterpret_cast<const unsigned char*>("") : data.data(),
        data.size(), digest.data(), &len);
    if (ok == nullptr || len != 32)
        throw Error("hmac_sha256: OpenSSL HMAC failed");
    return digest;
}

Bitstring keyed_hash(const Bitstring& key, const Bytes& data,
                     std::size_t out_bits) {
    const std::size_t out_bytes = (out_bits + 7) / 8;
    Bytes stream;
    stream.reserve(out_bytes);
    if (out_bits <= 256) {
        stream = hmac_sha256(key.bytes, data);
    } else {
        std::uint32_t counter = 0;
        while (stream.size() < out_bytes) {
            Bytes block_input = data;
            append_le32(block_input, counter++);
            Bytes block = hmac_sha256(key.bytes, block_input);
            stream.insert(stream.end(), block.begin(), block.end());
        }
    }
    stream.resize(out_bytes);
    if (out_bits % 8 != 0) {
        const unsigned keep = static_cast<unsigned>(out_bits % 8);
        stream.back() &= static_cast<std::uint8_t>(0xFF << (8 - keep));
    }
    return Bitstring{std::move(stream), out_bits};
}

Bitstring random_bits(std::size_t bits, SeededRng& rng) {
    Bitstring out;
    out.bits = bits;
    out.bytes.resize((bits + 7) / 8);
    for (auto& b : out.bytes)
        b = static_cast<std::uint8_t>(rng.next_u64() & 0xFF);
    if (bits % 8 != 0) {
        const unsigned keep = static_cast<unsigned>(bits % 8);
        out.bytes.back() &= static_cast<std::uint8_t>(0xFF << (8 - keep));
    }
    return out;
}

void append_le32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void append_le64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

Bytes canonical_bytes(const IntVector& v) {
    Bytes out;
    out.reserve(static_cast<std::size_t>(v.size()) * 4);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] < 0 || v[i] > 0xFFFFFFFFll)
            throw OutOfRange("canonical_bytes: entry outside u32 range");
        append_le32(out, static_cast<std::uint32_t>(v[i]));
    }
    return out;
}

Bytes canonical_bytes(const Vector& v) {
    Bytes out;
    out.reserve(static_cast<std::size_t>(v.size()) * 8);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const long long fixed = std::llround(v[i] * 1e6);
        append_le64(out, static_cast<std::uint64_t>(fixed));
    }
    return out;
}

std::string to_hex(const Bytes& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

std::uint64_t derive_user_seed(std::uint64_t master_seed,
                               const std::string& user_id) {
    Bytes key;
    append_le64(key, master_seed);
    Bytes data(user_id.begin(), user_id.end());
    const Bytes digest = hmac_sha256(key, data);
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; ++i)
        seed |= static_cast<std::uint64_t>(digest[i]) << (8 * i);
    return seed;
}

} // namespace l2fe
