#pragma once

#include "l2fe/core.hpp"
#include "l2fe/schemes.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace l2fe {

// Moore-Penrose pseudo-inverse of a wide matrix (n < m). Full row-rank
// inputs go through the normal-equations solve R^T (R R^T)^-1; if R R^T is
// ill-conditioned (cond > 1e12) the SVD route with singular values below
// 1e-10 * sigma_max zeroed is used instead.
Matrix pseudo_inverse(const Matrix& r);

// Scheme-specific surrogate recovered from leaked records alone:
//   MRP       x* = R^+ y                                  (length m)
//   Facial-FE x* = ss                                     (length m)
//   L2FE      x* = [centered_lift(c)/q ; rowmajor(A)/q]   (length m + m*l)
struct Surrogate {
    Vector values;
    SchemeKind source = SchemeKind::L2fe;
    std::string user_id;
};

Surrogate pipe_surrogate(const ProtectedRecord& record);

// Ridge linear map from surrogates to embeddings, the desk-scale stand-in
// for a trained inversion model. Fit minimizes
//   sum_i |W s_i - x_i|^2 + ridge * |W|_F^2
// via normal equations (dual form when the feature dimension exceeds the
// sample count). ridge = 0 with a singular system raises SingularSystem.
struct ReadoutModel {
    Matrix weights; // out_dim x feature_dim

    Vector predict(const Vector& surrogate) const { return weights * surrogate; }
};

ReadoutModel linear_readout_fit(
    const std::vector<std::pair<Vector, Vector>>& pairs, double ridge);

double cosine_similarity(const Vector& a, const Vector& b);

// Mean cosine between predicted and true embeddings.
double mean_readout_cosine(const ReadoutModel& model,
                           const std::vector<std::pair<Vector, Vector>>& pairs);

struct AttackReport {
    double asr = 0.0;
    std::vector<std::uint8_t> accepted; // per-user flags
    double leakage_cosine_mean = 0.0;
    double baseline_asr_mean = 0.0;
    double baseline_asr_sd = 0.0;
};

// Fraction of reconstructions whose normalized embedding is within l2
// distance t of the normalized original. Fills asr and the flags only.
AttackReport attack_asr(const std::vector<Vector>& reconstructed,
                        const std::vector<Vector>& originals, double t);

// Random-guessing success: per trial, pick one embedding and count the
// fraction of the others whose normalized distance is within t. Returns
// mean and sample standard deviation over trials.
std::pair<double, double> random_guess_asr(
    const std::vector<LabeledEmbedding>& dataset, double t, Eigen::Index trials,
    std::uint64_t seed);

// --- security game ------------------------------------------------------------

// One game trial as seen by an adversary. true_embedding is an oracle
// channel for harness sanity checks and the reduction tests; honest
// adversaries must not read it.
struct GameTrialView {
    const ProtectedRecord& record;     // full leak, extracted string included
    const BallDistributionSpec& dist;  // public input distribution
    const SchemeConfig& config;
    const Vector& true_embedding;
};

using GameAdversary = std::function<Vector(const GameTrialView&, SeededRng&)>;

struct GameResult {
    Eigen::Index wins_full = 0;
    Eigen::Index wins_baseline = 0;
    Eigen::Index trials = 0;
    double advantage = 0.0; // wins_full/trials - wins_baseline/trials
};

// Baseline guesser that uses only the distribution: the center of the most
// probable ball (ties break to the first). One natural instantiation of a
// helper-only adversary; reports flag it as such.
Vector baseline_center_adversary(const GameTrialView& view, SeededRng& rng);

// Surrogate-based guesser for the configured scheme (snaps the recovered
// information to the most consistent ball center).
Vector pipe_game_adversary(const GameTrialView& view, SeededRng& rng);

// Plays `trials` rounds: sample x from the ball mixture, Gen, let both the
// full adversary and the baseline guess, win iff l2(x, guess) <= t.
// Per-trial seeds derive from the master seed, so results are identical
// under any evaluation order.
GameResult run_ideal_primitive_game(const SchemeConfig& cfg,
                                    const BallDistributionSpec& dist,
                                    const GameAdversary& adversary, double t,
                                    Eigen::Index trials, std::uint64_t seed);

// --- reduction to the extractor-security game ---------------------------------

// Output of the distinguishing game: acceptance per branch (real extracted
// string vs uniform replacement) and their difference.
struct FeDistinguishResult {
    double accept_real = 0.0;
    double accept_uniform = 0.0;
    double advantage = 0.0;
    Eigen::Index trials = 0;
};

using FeDistinguisher = std::function<bool(const GameTrialView&, SeededRng&)>;

// Wraps a point-recovery adversary into a distinguisher: run the inner
// adversary on the leaked data, Rep its guess, answer 1 iff the reproduced
// string matches the challenge. FE schemes only.
FeDistinguisher reduction_adversary(GameAdversary inner);

// Paired evaluation: each trial presents the same (x, record) with the real
// extracted string and with a uniform replacement, at matched seeds.
FeDistinguishResult run_fe_distinguishing_game(const SchemeConfig& cfg,
                                               const BallDistributionSpec& dist,
                                               const FeDistinguisher& adversary,
                                               Eigen::Index trials,
                                               std::uint64_t seed);

// Scheme Rep against an explicit probe, for the reduction wrapper.
Bitstring scheme_rep(const ProtectedRecord& record, const Vector& probe,
                     const SchemeConfig& cfg);

// The stored extracted string of an FE record (MRP has none and throws).
const Bitstring& extracted_of(const ProtectedRecord& record);

} // namespace l2fe
