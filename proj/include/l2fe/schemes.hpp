#pragma once

#include "l2fe/core.hpp"
#include "l2fe/hash.hpp"
#include "l2fe/lattice.hpp"
#include "l2fe/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace l2fe {

enum class SchemeKind { Mrp, FacialFe, L2fe };

std::string scheme_name(SchemeKind kind);
SchemeKind scheme_from_name(const std::string& name);

// --- MRP --------------------------------------------------------------------

struct MrpParams {
    Eigen::Index input_dim = 512;  // m
    Eigen::Index output_dim = 128; // n < m
    double threshold = 1.0;        // T, accept iff |y - y'| <= T

    void validate() const;
};

// Both the projected vector and the projection matrix are persisted; under
// full leakage an attacker sees them both.
struct MrpRecord {
    Vector projected;  // y = (1/sqrt(n)) R x
    Matrix projection; // R, n x m
};

MrpRecord mrp_gen(const Vector& x, const MrpParams& params, std::uint64_t seed);
bool mrp_verify(const MrpRecord& stored, const Vector& probe,
                const MrpParams& params);

// Smallest n with n >= 4 ln k / (eps^2/2 - eps^3/3).
Eigen::Index jl_min_dimension(Eigen::Index k, double eps);

// --- Facial-FE ----------------------------------------------------------------

struct FacialFeParams {
    std::size_t lambda_bits = 768; // key gets lambda_bits - m bits
    std::size_t out_bits = 256;    // extracted string length
    double scale = 5.7;            // input pre-scaling factor

    void validate(Eigen::Index dim) const;
};

struct FacialFeRecord {
    Vector sketch;  // ss = c - x (in the scaled domain)
    Bitstring key;  // k
    Bitstring extracted; // r
};

// x must already be scaled (callers multiply by params.scale). The hash
// input x~ is reconstructed as c - ss in both Gen and Rep so both sides feed
// bit-identical bytes whenever the decode agrees.
FacialFeRecord facialfe_gen(const Vector& scaled_x, const FacialFeParams& params,
                            std::uint64_t seed);
Bitstring facialfe_rep(const Vector& scaled_probe, const FacialFeRecord& record);

// --- L2FE-Hash ----------------------------------------------------------------

struct L2feParams {
    Eigen::Index dim = 180;       // m
    Eigen::Index secret_dim = 60; // l
    std::int64_t modulus = 130003;
    std::size_t lambda_bits = 256; // hash key length
    std::size_t out_bits = 256;    // kappa <= 512
    QuantizerConfig quantizer;
    bool size_reduce_basis = false;

    void validate() const;
};

struct L2feRecord {
    IntMatrix matrix;  // A, m x l over Z_q
    IntVector masked;  // c = A b + x mod q
    Bitstring key;     // k
    Bitstring extracted; // r = H_k(b)
};

// Gen quantizes, samples A (resampling on rank deficiency), a fresh secret b
// and key k, and discards b after hashing.
L2feRecord l2fe_gen(const Vector& x_raw, const L2feParams& params,
                    std::uint64_t seed);

// Same, additionally exposing the ephemeral secret. Used by the security
// game harness and hygiene tests; the production path is l2fe_gen.
struct L2feGenTrace {
    L2feRecord record;
    IntVector secret; // b
    IntVector quantized; // x
};
L2feGenTrace l2fe_gen_traced(const Vector& x_raw, const L2feParams& params,
                             std::uint64_t seed);

// Reusable decoder for one record's lattice (basis + Gram-Schmidt).
struct L2feDecoder {
    QaryLatticeBasis basis;
    GramSchmidtData gs;

    static L2feDecoder build(const L2feRecord& record, const L2feParams& params);
    double error_bound() const { return bnp_error_bound(gs); }
};

// Rep: centered lift of c - x' into (-q/2, q/2], nearest-plane decode,
// coefficient recovery, hash. Never throws on decode failure; a point
// outside the lattice still yields a well-formed (necessarily wrong) output
// derived from the pivot-row coefficients.
Bitstring l2fe_rep(const Vector& probe_raw, const L2feRecord& record,
                   const L2feParams& params);
Bitstring l2fe_rep(const Vector& probe_raw, const L2feRecord& record,
                   const L2feParams& params, const L2feDecoder& decoder);

// --- common -------------------------------------------------------------------

// Constant-time bitstring equality; length mismatch rejects.
bool verify_exact(const Bitstring& r, const Bitstring& r_prime);

struct SchemeConfig {
    SchemeKind kind = SchemeKind::L2fe;
    MrpParams mrp;
    FacialFeParams facialfe;
    L2feParams l2fe;
};

struct ProtectedRecord {
    SchemeKind kind = SchemeKind::L2fe;
    std::string user_id;
    std::variant<MrpRecord, FacialFeRecord, L2feRecord> payload;
};

// Gen/Rep/Verify dispatch over the configured scheme. Raw embeddings go in;
// Facial-FE scaling and L2FE quantization happen inside.
ProtectedRecord scheme_gen(const std::string& user_id, const Vector& x,
                           const SchemeConfig& cfg, std::uint64_t seed);
bool scheme_verify(const ProtectedRecord& record, const Vector& probe,
                   const SchemeConfig& cfg);

} // namespace l2fe
