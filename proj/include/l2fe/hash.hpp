#pragma once

#include "l2fe/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace l2fe {

using Bytes = std::vector<std::uint8_t>;

// HMAC-SHA256 of `data` under `key` (OpenSSL-backed), 32-byte digest.
Bytes hmac_sha256(const Bytes& key, const Bytes& data);

// Keyed hash H_k(data) truncated/extended to out_bits.
//
// out_bits <= 256 takes a prefix of HMAC-SHA256(key, data). Longer outputs
// are built from counter blocks T_i = HMAC-SHA256(key, data || LE32(i)),
// i = 0, 1, ..., concatenated and truncated. Bits are counted MSB-first; a
// partial final byte keeps its high bits and zeroes the rest.
Bitstring keyed_hash(const Bitstring& key, const Bytes& data,
                     std::size_t out_bits);

// Fresh uniformly random bitstring (unused low bits of last byte zeroed).
class SeededRng;
Bitstring random_bits(std::size_t bits, SeededRng& rng);

// Canonical byte serializations fed to the keyed hash. These are fixed so
// Gen and Rep hash identical bytes for identical logical values:
//  - Z_q vectors: each entry as a little-endian unsigned 32-bit integer;
//  - real vectors: each entry rounded to 1e-6 fixed point, i.e.
//    llround(x * 1e6), as a little-endian signed 64-bit integer.
Bytes canonical_bytes(const IntVector& v);
Bytes canonical_bytes(const Vector& v);

void append_le32(Bytes& out, std::uint32_t v);
void append_le64(Bytes& out, std::uint64_t v);

std::string to_hex(const Bytes& bytes);

// Per-user seed derivation: first 8 bytes (little-endian) of
// HMAC-SHA256(LE64(master_seed), user_id).
std::uint64_t derive_user_seed(std::uint64_t master_seed,
                               const std::string& user_id);

} // namespace l2fe
