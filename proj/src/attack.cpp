#include "l2fe/attack.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

namespace l2fe {

Matrix pseudo_inverse(const Matrix& r) {
    if (r.rows() > r.cols())
        throw InvalidParameter("pseudo_inverse: expects a wide matrix (n <= m)");
    if (r.isZero(0.0)) throw DegenerateMatrix("pseudo_inverse: all-zero matrix");

    const Matrix gram = r * r.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const double lambda_max = eig.eigenvalues().maxCoeff();
    const double lambda_min = eig.eigenvalues().minCoeff();
    if (lambda_min > 0.0 && lambda_max / lambda_min <= 1e12) {
        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() == Eigen::Success)
            return llt.solve(r).transpose();
    }

    // Ill-conditioned: SVD with small singular values zeroed.
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = 1e-10 * svd.singularValues().maxCoeff();
    Vector inv_sigma = svd.singularValues();
    for (Eigen::Index i = 0; i < inv_sigma.size(); ++i)
        inv_sigma[i] = inv_sigma[i] > cutoff ? 1.0 / inv_sigma[i] : 0.0;
    return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

Surrogate pipe_surrogate(const ProtectedRecord& record) {
    Surrogate out;
    out.source = record.kind;
    out.user_id = record.user_id;
    switch (record.kind) {
        case SchemeKind::Mrp: {
            const auto& rec = std::get<MrpRecord>(record.payload);
            out.values = pseudo_inverse(rec.projection) * rec.projected *
                         std::sqrt(static_cast<double>(rec.projection.rows()));
            return out;
        }
        case SchemeKind::FacialFe: {
            out.values = std::get<FacialFeRecord>(record.payload).sketch;
            return out;
        }
        case SchemeKind::L2fe: {
            const auto& rec = std::get<L2feRecord>(record.payload);
            const Eigen::Index m = rec.masked.size();
            const Eigen::Index l = rec.matrix.cols();
            // Modulus is not stored in the record; the largest residue in
            // (A, c) is within one of q for any real parameter set, so the
            // scale only needs a consistent convention.
            const double q = static_cast<double>(
                std::max<std::int64_t>(rec.matrix.maxCoeff(),
                                       rec.masked.maxCoeff()) +
                1);
            const auto qi = static_cast<std::int64_t>(q);
            out.values.resize(m + m * l);
            for (Eigen::Index i = 0; i < m; ++i)
                out.values[i] =
                    static_cast<double>(centered_lift(rec.masked[i], qi)) / q;
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < l; ++j)
                    out.values[m + i * l + j] =
                        static_cast<double>(rec.matrix(i, j)) / q;
            return out;
        }
    }
    throw UnsupportedScheme("pipe_surrogate: bad tag");
}

ReadoutModel linear_readout_fit(
    const std::vector<std::pair<Vector, Vector>>& pairs, double ridge) {
    if (pairs.size() < 2)
        throw InvalidParameter("linear_readout_fit: need at least 2 pairs");
    if (ridge < 0.0)
        throw InvalidParameter("linear_readout_fit: negative ridge");
    const Eigen::Index feat_dim = pairs.front().first.size();
    const Eigen::Index out_dim = pairs.front().second.size();
    const auto n = static_cast<Eigen::Index>(pairs.size());
    for (const auto& [s, x] : pairs)
        if (s.size() != feat_dim || x.size() != out_dim)
            throw DimensionMismatch("linear_readout_fit: inconsistent pair "
                                    "dimensions");

    Matrix features(feat_dim, n);
    Matrix targets(out_dim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        features.col(i) = pairs[static_cast<std::size_t>(i)].first;
        targets.col(i) = pairs[static_cast<std::size_t>(i)].second;
    }

    ReadoutModel model;
    if (ridge > 0.0 && feat_dim > n) {
        // Dual form: W = Y (X^T X + ridge I)^-1 X^T, same minimizer.
        Matrix kernel = features.transpose() * features;
        kernel.diagonal().array() += ridge;
        const Matrix z = kernel.ldlt().solve(targets.transpose()); // n x out
        model.weights = (features * z).transpose();
        return model;
    }
    Matrix gram = features * features.transpose();
    gram.diagonal().array() += ridge;
    if (ridge == 0.0) {
        Eigen::FullPivLU<Matrix> lu(gram);
        if (!lu.isInvertible())
            throw SingularSystem("linear_readout_fit: singular normal matrix "
                                 "with ridge = 0; raise the ridge");
        model.weights = lu.solve(features * targets.transpose()).transpose();
        return model;
    }
    model.weights =
        gram.ldlt().solve(features * targets.transpose()).transpose();
    return model;
}

double cosine_similarity(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("cosine_similarity: dimension mismatch");
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

double mean_readout_cosine(const ReadoutModel& model,
                           const std::vector<std::pair<Vector, Vector>>& pairs) {
    if (pairs.empty())
        throw InsufficientData("mean_readout_cosine: no evaluation pairs");
    double total = 0.0;
    for (const auto& [s, x] : pairs)
        total += cosine_similarity(model.predict(s), x);
    return total / static_cast<double>(pairs.size());
}

AttackReport attack_asr(const std::vector<Vector>& reconstructed,
                        const std::vector<Vector>& originals, double t) {
    if (reconstructed.size() != originals.size())
        throw DimensionMismatch("attack_asr: list length mismatch");
    if (reconstructed.empty())
        throw InsufficientData("attack_asr: empty input");
    AttackReport report;
    report.accepted.resize(reconstructed.size());
    double hits = 0.0;
    for (std::size_t i = 0; i < reconstructed.size(); ++i) {
        const bool ok = l2_distance(normalize(reconstructed[i]),
                                    normalize(originals[i])) <= t;
        report.accepted[i] = ok ? 1 : 0;
        hits += ok ? 1.0 : 0.0;
    }
    report.asr = hits / static_cast<double>(reconstructed.size());
    return report;
}

std::pair<double, double> random_guess_asr(
    const std::vector<LabeledEmbedding>& dataset, double t, Eigen::Index trials,
    std::uint64_t seed) {
    if (dataset.size() < 2)
        throw InsufficientData("random_guess_asr: need at least 2 users");
    if (trials < 1) throw InvalidParameter("random_guess_asr: trials < 1");

    std::vector<Vector> normalized;
    normalized.reserve(dataset.size());
    for (const auto& row : dataset) normalized.push_back(normalize(row.values));

    SeededRng rng(seed);
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(trials));
    for (Eigen::Index trial = 0; trial < trials; ++trial) {
        const std::size_t target =
            static_cast<std::size_t>(rng.uniform_int(normalized.size()));
        std::size_t hits = 0;
        for (std::size_t j = 0; j < normalized.size(); ++j) {
            if (j == target) continue;
            if ((normalized[j] - normalized[target]).norm() <= t) ++hits;
        }
        rates.push_back(static_cast<double>(hits) /
                        static_cast<double>(normalized.size() - 1));
    }
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    double var = 0.0;
    for (double r : rates) var += (r - mean) * (r - mean);
    var = rates.size() > 1 ? var / static_cast<double>(rates.size() - 1) : 0.0;
    return {mean, std::sqrt(var)};
}

// --- security game ------------------------------------------------------------

Vector baseline_center_adversary(const GameTrialView& view, SeededRng&) {
    return view.dist.centers.col(0);
}

namespace {

Vector dequantize_mid(const IntVector& v, const QuantizerConfig& cfg) {
    Vector out(v.size());
    const double step =
        (cfg.max - cfg.min) / (static_cast<double>(cfg.modulus) * cfg.scale);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[i] = cfg.min + (static_cast<double>(v[i]) + 0.5) * step;
    return out;
}

} // namespace

Vector pipe_game_adversary(const GameTrialView& view, SeededRng&) {
    const Matrix& centers = view.dist.centers;
    switch (view.record.kind) {
        case SchemeKind::Mrp: {
            const Vector x_star = pipe_surrogate(view.record).values;
            Eigen::Index best = 0;
            double best_cos = -2.0;
            for (Eigen::Index j = 0; j < centers.cols(); ++j) {
                const double c = cosine_similarity(x_star, centers.col(j));
                if (c > best_cos) {
                    best_cos = c;
                    best = j;
                }
            }
            return centers.col(best);
        }
        case SchemeKind::FacialFe: {
            const auto& rec = std::get<FacialFeRecord>(view.record.payload);
            const double scale = view.config.facialfe.scale;
            // x = (c - ss)/scale for the (unknown) decode c; test each ball's
            // consistent candidate and keep the most self-consistent one.
            Eigen::Index best = 0;
            double best_err = std::numeric_limits<double>::infinity();
            Vector best_guess = centers.col(0);
            for (Eigen::Index j = 0; j < centers.cols(); ++j) {
                const Vector c_j =
                    decode_e8(centers.col(j) * scale + rec.sketch);
                const Vector guess = (c_j - rec.sketch) / scale;
                const double err = (guess - centers.col(j)).norm();
                if (err < best_err) {
                    best_err = err;
                    best = j;
                    best_guess = guess;
                }
            }
            (void)best;
            return best_guess;
        }
        case SchemeKind::L2fe: {
            const auto& rec = std::get<L2feRecord>(view.record.payload);
            const Vector masked_real =
                dequantize_mid(rec.masked, view.config.l2fe.quantizer);
            Eigen::Index best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < centers.cols(); ++j) {
                const double d = (masked_real - centers.col(j)).norm();
                if (d < best_dist) {
                    best_dist = d;
                    best = j;
                }
            }
            return centers.col(best);
        }
    }
    throw UnsupportedScheme("pipe_game_adversary: bad tag");
}

namespace {

struct GameTrial {
    Vector x;
    ProtectedRecord record;
};

GameTrial make_trial(const SchemeConfig& cfg, const BallDistributionSpec& dist,
                     std::uint64_t seed, Eigen::Index trial) {
    SeededRng rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    const auto ball = static_cast<Eigen::Index>(
        rng.uniform_int(static_cast<std::uint64_t>(dist.ball_count())));
    GameTrial t;
    t.x = dist.centers.col(ball) + dist.radius * uniform_in_ball(dist.dim, rng);
    t.record = scheme_gen("trial", t.x, cfg, rng.next_u64());
    return t;
}

} // namespace

GameResult run_ideal_primitive_game(const SchemeConfig& cfg,
                                    const BallDistributionSpec& dist,
                                    const GameAdversary& adversary, double t,
                                    Eigen::Index trials, std::uint64_t seed) {
    dist.validate();
    if (trials < 1) throw InvalidParameter("game: trials < 1");
    GameResult result;
    result.trials = trials;
    for (Eigen::Index i = 0; i < trials; ++i) {
        const GameTrial trial = make_trial(cfg, dist, seed, i);
        const GameTrialView view{trial.record, dist, cfg, trial.x};

        SeededRng full_rng(mix_seed(seed ^ 0xF011ull, static_cast<std::uint64_t>(i)));
        if (l2_distance(trial.x, adversary(view, full_rng)) <= t)
            ++result.wins_full;

        SeededRng base_rng(mix_seed(seed ^ 0xBA5Eull, static_cast<std::uint64_t>(i)));
        if (l2_distance(trial.x, baseline_center_adversary(view, base_rng)) <= t)
            ++result.wins_baseline;
    }
    result.advantage =
        static_cast<double>(result.wins_full - result.wins_baseline) /
        static_cast<double>(trials);
    return result;
}

// --- reduction ------------------------------------------------------------------

Bitstring scheme_rep(const ProtectedRecord& record, const Vector& probe,
                     const SchemeConfig& cfg) {
    switch (record.kind) {
        case SchemeKind::FacialFe:
            return facialfe_rep(probe * cfg.facialfe.scale,
                                std::get<FacialFeRecord>(record.payload));
        case SchemeKind::L2fe:
            return l2fe_rep(probe, std::get<L2feRecord>(record.payload),
                            cfg.l2fe);
        case SchemeKind::Mrp:
            break;
    }
    throw UnsupportedScheme("scheme_rep: no extracted string for this scheme");
}

FeDistinguisher reduction_adversary(GameAdversary inner) {
    return [inner = std::move(inner)](const GameTrialView& view,
                                      SeededRng& rng) -> bool {
        const Vector guess = inner(view, rng);
        Bitstring reproduced;
        try {
            reproduced = scheme_rep(view.record, guess, view.config);
        } catch (const Error&) {
            return false; // unusable guess (e.g. out of quantizer range)
        }
        return verify_exact(reproduced, extracted_of(view.record));
    };
}

const Bitstring& extracted_of(const ProtectedRecord& record) {
    switch (record.kind) {
        case SchemeKind::FacialFe:
            return std::get<FacialFeRecord>(record.payload).extracted;
        case SchemeKind::L2fe:
            return std::get<L2feRecord>(record.payload).extracted;
        case SchemeKind::Mrp:
            break;
    }
    throw UnsupportedScheme("extracted_of: scheme has no extracted string");
}

FeDistinguishResult run_fe_distinguishing_game(const SchemeConfig& cfg,
                                               const BallDistributionSpec& dist,
                                               const FeDistinguisher& adversary,
                                               Eigen::Index trials,
                                               std::uint64_t seed) {
    dist.validate();
    if (trials < 1) throw InvalidParameter("fe game: trials < 1");
    FeDistinguishResult result;
    result.trials = trials;
    Eigen::Index accept_real = 0;
    Eigen::Index accept_uniform = 0;
    for (Eigen::Index i = 0; i < trials; ++i) {
        GameTrial trial = make_trial(cfg, dist, seed, i);

        {
            const GameTrialView view{trial.record, dist, cfg, trial.x};
            SeededRng rng(mix_seed(seed ^ 0x4EA1ull, static_cast<std::uint64_t>(i)));
            if (adversary(view, rng)) ++accept_real;
        }
        {
            // Same trial, extracted string replaced by a uniform draw.
            ProtectedRecord swapped = trial.record;
            SeededRng swap_rng(mix_seed(seed ^ 0x0D17ull, static_cast<std::uint64_t>(i)));
            Bitstring uniform =
                random_bits(extracted_of(trial.record).bits, swap_rng);
            if (swapped.kind == SchemeKind::FacialFe)
                std::get<FacialFeRecord>(swapped.payload).extracted = uniform;
            else
                std::get<L2feRecord>(swapped.payload).extracted = uniform;
            const GameTrialView view{swapped, dist, cfg, trial.x};
            SeededRng rng(mix_seed(seed ^ 0x4EA1ull, static_cast<std::uint64_t>(i)));
            if (adversary(view, rng)) ++accept_uniform;
        }
    }
    result.accept_real =
        static_cast<double>(accept_real) / static_cast<double>(trials);
    result.accept_uniform =
        static_cast<double>(accept_uniform) / static_cast<double>(trials);
    result.advantage = result.accept_real - result.accept_uniform;
    return result;
}

} // namespace l2fe
