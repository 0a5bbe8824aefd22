#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace l2fe {

// Dense math types. Embeddings are real row vectors x in R^m; modular
// vectors/matrices over Z_q are kept in 64-bit integers so products of two
// residues (q < 2^32) never overflow.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct LabeledEmbedding {
    std::string user_id;
    Vector values;
};

// A string of `bits` bits packed MSB-first into bytes. Unused low-order bits
// of the final byte are zero.
struct Bitstring {
    std::vector<std::uint8_t> bytes;
    std::size_t bits = 0;

    bool operator==(const Bitstring& other) const = default;
};

// Constant-time comparison; length mismatch rejects without early exit.
inline bool constant_time_equal(const Bitstring& a, const Bitstring& b) {
    unsigned diff = a.bits == b.bits ? 0u : 1u;
    const std::size_t n = std::min(a.bytes.size(), b.bytes.size());
    diff |= static_cast<unsigned>(a.bytes.size() ^ b.bytes.size());
    for (std::size_t i = 0; i < n; ++i) diff |= a.bytes[i] ^ b.bytes[i];
    return diff == 0;
}

} // namespace l2fe
