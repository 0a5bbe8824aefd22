#include "l2fe/schemes.hpp"

#include <cmath>

namespace l2fe {

std::string scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Mrp: return "mrp";
        case SchemeKind::FacialFe: return "facialfe";
        case SchemeKind::L2fe: return "l2fe";
    }
    throw UnsupportedScheme("scheme_name: bad tag");
}

SchemeKind scheme_from_name(const std::string& name) {
    if (name == "mrp") return SchemeKind::Mrp;
    if (name == "facialfe") return SchemeKind::FacialFe;
    if (name == "l2fe") return SchemeKind::L2fe;
    throw UnsupportedScheme("unknown scheme '" + name + "'");
}

// --- MRP --------------------------------------------------------------------

void MrpParams::validate() const {
    if (output_dim <= 0 || output_dim >= input_dim)
        throw InvalidParameter("mrp: need 0 < n < m");
    if (!(threshold > 0.0)) throw InvalidParameter("mrp: threshold must be > 0");
}

MrpRecord mrp_gen(const Vector& x, const MrpParams& params, std::uint64_t seed) {
    params.validate();
    if (x.size() != params.input_dim)
        throw DimensionMismatch("mrp_gen: embedding dimension " +
                                std::to_string(x.size()) + " != " +
                                std::to_string(params.input_dim));
    SeededRng rng(seed);
    Matrix r(params.output_dim, params.input_dim);
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = rng.normal();
    MrpRecord rec;
    rec.projection = std::move(r);
    rec.projected = rec.projection * x /
                    std::sqrt(static_cast<double>(params.output_dim));
    return rec;
}

bool mrp_verify(const MrpRecord& stored, const Vector& probe,
                const MrpParams& params) {
    if (probe.size() != stored.projection.cols())
        throw DimensionMismatch("mrp_verify: probe dimension mismatch");
    const Vector y_prime = stored.projection * probe /
                           std::sqrt(static_cast<double>(params.output_dim));
    return (stored.projected - y_prime).norm() <= params.threshold;
}

Eigen::Index jl_min_dimension(Eigen::Index k, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw InvalidParameter("jl_min_dimension: eps must be in (0, 1)");
    if (k < 2) throw InvalidParameter("jl_min_dimension: k must be >= 2");
    const double denom = eps * eps / 2.0 - eps * eps * eps / 3.0;
    return static_cast<Eigen::Index>(
        std::ceil(4.0 * std::log(static_cast<double>(k)) / denom));
}

// --- Facial-FE ----------------------------------------------------------------

void FacialFeParams::validate(Eigen::Index dim) const {
    if (dim <= 0 || dim % 8 != 0)
        throw InvalidDimension("facialfe: dimension must be a multiple of 8");
    if (lambda_bits <= static_cast<std::size_t>(dim))
        throw InvalidParameter("facialfe: lambda must exceed the dimension");
    if (out_bits == 0 || out_bits > 512)
        throw InvalidParameter("facialfe: out_bits must be in [1, 512]");
    if (!(scale > 0.0)) throw InvalidParameter("facialfe: scale must be > 0");
}

namespace {

Bitstring facialfe_hash(const Bitstring& key, const Vector& x_tilde,
                        const Vector& sketch, std::size_t out_bits) {
    Bytes data = canonical_bytes(x_tilde);
    const Bytes ss = canonical_bytes(sketch);
    data.insert(data.end(), ss.begin(), ss.end());
    return keyed_hash(key, data, out_bits);
}

} // namespace

FacialFeRecord facialfe_gen(const Vector& scaled_x, const FacialFeParams& params,
                            std::uint64_t seed) {
    params.validate(scaled_x.size());
    const Vector c = decode_e8(scaled_x);
    FacialFeRecord rec;
    rec.sketch = c - scaled_x;
    SeededRng rng(seed);
    rec.key = random_bits(
        params.lambda_bits - static_cast<std::size_t>(scaled_x.size()), rng);
    // Hash input is c - ss, not x itself: Rep recomputes the same expression,
    // so both sides serialize bit-identical bytes whenever decode agrees.
    rec.extracted =
        facialfe_hash(rec.key, c - rec.sketch, rec.sketch, params.out_bits);
    return rec;
}

Bitstring facialfe_rep(const Vector& scaled_probe, const FacialFeRecord& record) {
    if (scaled_probe.size() != record.sketch.size())
        throw DimensionMismatch("facialfe_rep: probe dimension mismatch");
    const Vector shifted = scaled_probe + record.sketch;
    const Vector c_star = decode_e8(shifted);
    const Vector x_tilde = c_star - record.sketch;
    return facialfe_hash(record.key, x_tilde, record.sketch,
                         record.extracted.bits);
}

// --- L2FE-Hash ----------------------------------------------------------------

void L2feParams::validate() const {
    if (secret_dim < 1 || secret_dim >= dim)
        throw InvalidParameter("l2fe: need 1 <= l < m");
    if (!is_prime(modulus))
        throw InvalidParameter("l2fe: modulus must be prime");
    if (out_bits == 0 || out_bits > 512)
        throw InvalidParameter("l2fe: out_bits must be in [1, 512]");
    if (lambda_bits == 0) throw InvalidParameter("l2fe: lambda_bits == 0");
    quantizer.validate();
    if (quantizer.modulus != modulus)
        throw InvalidParameter("l2fe: quantizer modulus != scheme modulus");
}

L2feGenTrace l2fe_gen_traced(const Vector& x_raw, const L2feParams& params,
                             std::uint64_t seed) {
    params.validate();
    if (x_raw.size() != params.dim)
        throw DimensionMismatch("l2fe_gen: embedding dimension " +
                                std::to_string(x_raw.size()) + " != " +
                                std::to_string(params.dim));
    const IntVector x = quantize(x_raw, params.quantizer);
    const std::int64_t q = params.modulus;
    SeededRng rng(seed);

    IntMatrix a(params.dim, params.secret_dim);
    for (int attempt = 0;; ++attempt) {
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                a(i, j) = static_cast<std::int64_t>(
                    rng.uniform_int(static_cast<std::uint64_t>(q)));
        try {
            build_qary_basis(a, q); // rank check; deficient A is resampled
            break;
        } catch (const RankDeficient&) {
            if (attempt > 64)
                throw RankDeficient("l2fe_gen: cannot sample full-rank A");
        }
    }

    IntVector b(params.secret_dim);
    for (Eigen::Index i = 0; i < b.size(); ++i)
        b[i] = static_cast<std::int64_t>(
            rng.uniform_int(static_cast<std::uint64_t>(q)));

    L2feGenTrace trace;
    trace.record.matrix = a;
    trace.record.masked.resize(params.dim);
    for (Eigen::Index r = 0; r < params.dim; ++r) {
        std::int64_t acc = 0;
        for (Eigen::Index k = 0; k < params.secret_dim; ++k)
            acc = mod_q(acc + a(r, k) * b[k], q);
        trace.record.masked[r] = mod_q(acc + x[r], q);
    }
    trace.record.key = random_bits(params.lambda_bits, rng);
    trace.record.extracted =
        keyed_hash(trace.record.key, canonical_bytes(b), params.out_bits);
    trace.secret = b;
    trace.quantized = x;
    return trace;
}

L2feRecord l2fe_gen(const Vector& x_raw, const L2feParams& params,
                    std::uint64_t seed) {
    return l2fe_gen_traced(x_raw, params, seed).record;
}

L2feDecoder L2feDecoder::build(const L2feRecord& record,
                               const L2feParams& params) {
    L2feDecoder d;
    d.basis = build_qary_basis(record.matrix, params.modulus);
    d.gs = qary_gram_schmidt(d.basis);
    if (params.size_reduce_basis) size_reduce(d.basis.basis, d.gs);
    return d;
}

Bitstring l2fe_rep(const Vector& probe_raw, const L2feRecord& record,
                   const L2feParams& params, const L2feDecoder& decoder) {
    const IntVector x_prime = quantize(probe_raw, params.quantizer);
    if (x_prime.size() != record.masked.size())
        throw DimensionMismatch("l2fe_rep: probe dimension mismatch");
    const std::int64_t q = params.modulus;

    Vector beta(record.masked.size());
    for (Eigen::Index i = 0; i < beta.size(); ++i)
        beta[i] = static_cast<double>(
            centered_lift(record.masked[i] - x_prime[i], q));

    const BabaiResult decoded =
        babai_nearest_plane(decoder.basis, decoder.gs, beta);
    IntVector b_hat;
    try {
        b_hat = recover_coefficients(decoder.basis, decoded.lattice_point);
    } catch (const NotInLattice&) {
        // Authentication simply fails downstream; still answer something
        // well-formed.
        b_hat = coefficients_from_pivots(decoder.basis, decoded.lattice_point);
    }
    return keyed_hash(record.key, canonical_bytes(b_hat), record.extracted.bits);
}

Bitstring l2fe_rep(const Vector& probe_raw, const L2feRecord& record,
                   const L2feParams& params) {
    return l2fe_rep(probe_raw, record, params,
                    L2feDecoder::build(record, params));
}

// --- common -------------------------------------------------------------------

bool verify_exact(const Bitstring& r, const Bitstring& r_prime) {
    return constant_time_equal(r, r_prime);
}

ProtectedRecord scheme_gen(const std::string& user_id, const Vector& x,
                           const SchemeConfig& cfg, std::uint64_t seed) {
    ProtectedRecord rec;
    rec.kind = cfg.kind;
    rec.user_id = user_id;
    switch (cfg.kind) {
        case SchemeKind::Mrp:
            rec.payload = mrp_gen(x, cfg.mrp, seed);
            break;
        case SchemeKind::FacialFe:
            rec.payload = facialfe_gen(x * cfg.facialfe.scale, cfg.facialfe, seed);
            break;
        case SchemeKind::L2fe:
            rec.payload = l2fe_gen(x, cfg.l2fe, seed);
            break;
    }
    return rec;
}

bool scheme_verify(const ProtectedRecord& record, const Vector& probe,
                   const SchemeConfig& cfg) {
    switch (record.kind) {
        case SchemeKind::Mrp:
            return mrp_verify(std::get<MrpRecord>(record.payload), probe,
                              cfg.mrp);
        case SchemeKind::FacialFe: {
            const auto& rec = std::get<FacialFeRecord>(record.payload);
            const Bitstring r_prime =
                facialfe_rep(probe * cfg.facialfe.scale, rec);
            return verify_exact(rec.extracted, r_prime);
        }
        case SchemeKind::L2fe: {
            const auto& rec = std::get<L2feRecord>(record.payload);
            const Bitstring r_prime = l2fe_rep(probe, rec, cfg.l2fe);
            return verify_exact(rec.extracted, r_prime);
        }
    }
    throw UnsupportedScheme("scheme_verify: bad tag");
}

} // namespace l2fe
