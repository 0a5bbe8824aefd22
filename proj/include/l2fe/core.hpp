#pragma once

#include "l2fe/errors.hpp"
#include "l2fe/rng.hpp"
#include "l2fe/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace l2fe {

// Scalar quantizer mapping [min, max] into Z_q. min/max are dataset-global
// constants carried in the store header so enrollment and reproduction
// quantize identically.
struct QuantizerConfig {
    double min = 0.0;
    double max = 1.0;
    std::int64_t modulus = 130003; // prime q
    double scale = 0.0014;         // in (0, 1]

    void validate() const;
};

// Per-coordinate floor((x_i - min) / (max - min) * q * scale), reduced into
// [0, q). Coordinates outside [min, max] raise OutOfRange naming the index.
IntVector quantize(const Vector& x, const QuantizerConfig& cfg);

// Euclidean distance; dimensions must agree.
template <typename DerivedA, typename DerivedB>
double l2_distance(const Eigen::MatrixBase<DerivedA>& u,
                   const Eigen::MatrixBase<DerivedB>& v) {
    if (u.size() != v.size())
        throw DimensionMismatch("l2_distance: " + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()));
    return (u - v).norm();
}

// Unit-norm copy of v; zero vectors raise ZeroNorm.
template <typename Derived>
Vector normalize(const Eigen::MatrixBase<Derived>& v) {
    const double n = v.norm();
    if (n <= 0.0) throw ZeroNorm("normalize: zero vector");
    return v / n;
}

// Gaussian random projection R^m -> R^target_dim with entries i.i.d. N(0,1)
// scaled by 1/sqrt(target_dim). Same (x, seed) gives identical output.
Vector random_projection_reduce(const Vector& x, Eigen::Index target_dim,
                                std::uint64_t seed);

// The projection matrix itself (row-major sampling order), for batch use:
// all rows of a dataset must go through one matrix.
Matrix gaussian_projection_matrix(Eigen::Index target_dim, Eigen::Index dim,
                                  std::uint64_t seed);

// Synthetic input model: beta disjoint eps-balls with centers inside
// [-R+eps, R-eps]^m, sampled uniformly per ball. m must be even.
struct BallDistributionSpec {
    Eigen::Index dim = 0;
    double bound = 0.0; // R
    Matrix centers;     // dim x beta, one center per column
    double radius = 0.0;
    std::uint64_t seed = 0;

    Eigen::Index ball_count() const { return centers.cols(); }
    void validate() const;
};

// Random spec with centers drawn in the admissible box, resampled until the
// pairwise separation constraint holds.
BallDistributionSpec make_ball_spec(Eigen::Index dim, double bound,
                                    Eigen::Index beta, double radius,
                                    std::uint64_t seed);

// Uniform point in the unit ball: direction from a normalized Gaussian,
// radius U^(1/m). Exact, rejection-free.
Vector uniform_in_ball(Eigen::Index dim, SeededRng& rng);

// beta * per_ball points, per_ball consecutive samples per ball, labeled by
// ball index; deterministic under spec.seed.
std::vector<LabeledEmbedding> sample_c_epsilon(const BallDistributionSpec& spec,
                                               Eigen::Index per_ball);

std::string ball_label(Eigen::Index ball_index);

// Embedding CSV: header "id,v0,...,v{m-1}", then one row per embedding.
// UTF-8, LF line endings, '.' decimal separator. Export uses 17 significant
// digits so load(export(x)) == x exactly.
std::vector<LabeledEmbedding> load_embeddings(const std::string& path);
void export_embeddings(const std::string& path,
                       const std::vector<LabeledEmbedding>& rows);

} // namespace l2fe
