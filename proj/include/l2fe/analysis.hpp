#pragma once

#include "l2fe/errors.hpp"

#include <Eigen/Core>
#include <cstdint>

namespace l2fe {

// Parameter certification inputs: lattice dimensions (m, l, q), the support
// bound R with slack factor alpha > 1, the extractor slack eps_fe, and the
// ball-mixture shape (beta balls of radius epsilon).
struct SecurityParams {
    Eigen::Index m = 180;
    Eigen::Index l = 60;
    std::int64_t q = 130003;
    double bound = 0.0;   // R; 0 means "use min_radius(m, l, q, alpha)"
    double alpha = 1.1;
    double eps_fe = 9.094947017729282e-13; // 2^-40
    Eigen::Index beta = 1;
    double epsilon = 1.0;

    void validate() const;
};

struct EntropyReport {
    double volume_log2 = 0.0; // log2 of the ball-union volume f
    double h_bits = 0.0;      // min-entropy of the uniform mixture
    double gamma_bits = 0.0;  // residual entropy after the mask leak
    std::int64_t kappa_max = 0; // extractable bits (0 when gamma too small)
    double r_min = 0.0;       // smallest admissible R
    double bound = 0.0;       // R actually used
    bool feasible = false;
};

// log2(beta * pi^(m/2) / (m/2)! * eps^m), via lgamma. m must be even.
double ball_union_volume_log2(Eigen::Index beta, double epsilon,
                              Eigen::Index m);

// Min-entropy (bits) of the uniform distribution over the ball union.
double min_entropy_uniform(Eigen::Index beta, double epsilon, Eigen::Index m);

// h + m log2(alpha) - m log2(2R + 1); may be negative.
double gamma_bound(double h_bits, Eigen::Index m, double alpha, double r);

// max(0, floor(gamma - 2 log2(1/eps_fe) + 2)).
std::int64_t extractable_bits(double gamma_bits, double eps_fe);

// alpha * sqrt(m / (2 pi e)) * q^(1 - l/m).
double min_radius(Eigen::Index m, Eigen::Index l, std::int64_t q, double alpha);

// Composes the above plus a packing-count feasibility check
// (beta * vol(eps-ball) <= vol([-R, R]^m), necessary for disjointness).
EntropyReport certify_params(const SecurityParams& p);

// Exact binomial tail P[Bin(n, p) > n/2].
double majority_success_probability(Eigen::Index n, double p_single);

// Smallest odd n with majority_success_probability(n, p) >= 1 - delta.
Eigen::Index majority_votes_needed(double p_single, double delta);

} // namespace l2fe
