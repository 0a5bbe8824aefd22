#include "l2fe/analysis.hpp"

#include "l2fe/lattice.hpp"

#include <cmath>

namespace l2fe {

namespace {
constexpr double kLog2E = 1.4426950408889634074; // 1 / ln 2
constexpr double kPi = 3.14159265358979323846;
} // namespace

void SecurityParams::validate() const {
    if (m <= 0 || m % 2 != 0)
        throw InvalidParameter("security params: m must be even and positive");
    if (l < 1 || l >= m) throw InvalidParameter("security params: need l < m");
    if (!is_prime(q)) throw InvalidParameter("security params: q must be prime");
    if (!(alpha > 1.0)) throw InvalidParameter("security params: alpha <= 1");
    if (!(eps_fe > 0.0 && eps_fe < 1.0))
        throw InvalidParameter("security params: eps_fe outside (0, 1)");
    if (beta < 1) throw InvalidParameter("security params: beta < 1");
    if (!(epsilon > 0.0))
        throw InvalidParameter("security params: epsilon <= 0");
}

double ball_union_volume_log2(Eigen::Index beta, double epsilon,
                              Eigen::Index m) {
    if (m < 2 || m % 2 != 0)
        throw InvalidParameter("ball_union_volume_log2: m must be even, >= 2");
    if (beta < 1) throw InvalidParameter("ball_union_volume_log2: beta < 1");
    if (!(epsilon > 0.0))
        throw InvalidParameter("ball_union_volume_log2: epsilon <= 0");
    const double half_m = static_cast<double>(m) / 2.0;
    // log2((m/2)!) through lgamma; the factorial overflows by m ~ 300.
    const double log2_fact = std::lgamma(half_m + 1.0) * kLog2E;
    return std::log2(static_cast<double>(beta)) + half_m * std::log2(kPi) -
           log2_fact + static_cast<double>(m) * std::log2(epsilon);
}

double min_entropy_uniform(Eigen::Index beta, double epsilon, Eigen::Index m) {
    return ball_union_volume_log2(beta, epsilon, m);
}

double gamma_bound(double h_bits, Eigen::Index m, double alpha, double r) {
    return h_bits + static_cast<double>(m) * std::log2(alpha) -
           static_cast<double>(m) * std::log2(2.0 * r + 1.0);
}

std::int64_t extractable_bits(double gamma_bits, double eps_fe) {
    if (!(eps_fe > 0.0 && eps_fe < 1.0))
        throw InvalidParameter("extractable_bits: eps_fe outside (0, 1)");
    const double kappa = gamma_bits - 2.0 * std::log2(1.0 / eps_fe) + 2.0;
    if (kappa <= 0.0) return 0;
    return static_cast<std::int64_t>(std::floor(kappa));
}

double min_radius(Eigen::Index m, Eigen::Index l, std::int64_t q, double alpha) {
    const double md = static_cast<double>(m);
    const double exponent = 1.0 - static_cast<double>(l) / md;
    return alpha * std::sqrt(md / (2.0 * kPi * std::exp(1.0))) *
           std::pow(static_cast<double>(q), exponent);
}

EntropyReport certify_params(const SecurityParams& p) {
    p.validate();
    EntropyReport report;
    report.r_min = min_radius(p.m, p.l, p.q, p.alpha);
    report.bound = p.bound > 0.0 ? p.bound : report.r_min;
    report.volume_log2 = ball_union_volume_log2(p.beta, p.epsilon, p.m);
    report.h_bits = report.volume_log2;
    report.gamma_bits = gamma_bound(report.h_bits, p.m, p.alpha, report.bound);
    report.kappa_max = extractable_bits(report.gamma_bits, p.eps_fe);

    const bool radius_ok = report.bound >= report.r_min;
    // Necessary packing condition: the ball union cannot outgrow the box.
    const double box_log2 =
        static_cast<double>(p.m) * std::log2(2.0 * report.bound);
    const bool packing_ok = report.volume_log2 <= box_log2 &&
                            p.epsilon <= report.bound;
    report.feasible = radius_ok && packing_ok && report.kappa_max > 0;
    return report;
}

double majority_success_probability(Eigen::Index n, double p_single) {
    // Sum of binomial probabilities for j > n/2, in log space per term.
    const double log_p = std::log(p_single);
    const double log_1p = std::log1p(-p_single);
    const double log_fact_n = std::lgamma(static_cast<double>(n) + 1.0);
    double total = 0.0;
    for (Eigen::Index j = n / 2 + 1; j <= n; ++j) {
        const double lw = log_fact_n -
                          std::lgamma(static_cast<double>(j) + 1.0) -
                          std::lgamma(static_cast<double>(n - j) + 1.0) +
                          static_cast<double>(j) * log_p +
                          static_cast<double>(n - j) * log_1p;
        total += std::exp(lw);
    }
    return std::min(total, 1.0);
}

Eigen::Index majority_votes_needed(double p_single, double delta) {
    if (!(p_single > 0.5 && p_single < 1.0))
        throw InfeasibleBoost("majority_votes_needed: p_single must be in "
                              "(0.5, 1)");
    if (!(delta > 0.0 && delta < 0.5))
        throw InvalidParameter("majority_votes_needed: delta outside (0, 0.5)");

    const double target = 1.0 - delta;
    // Success probability is nondecreasing in n over odd n for p > 1/2, so
    // exponential search then bisection over odd candidates is exact.
    Eigen::Index lo = 1;
    if (majority_success_probability(lo, p_single) >= target) return lo;
    Eigen::Index hi = 3;
    const Eigen::Index cap = 4'000'001;
    while (majority_success_probability(hi, p_single) < target) {
        lo = hi;
        hi = hi * 2 + 1;
        if (hi > cap)
            throw InfeasibleBoost("majority_votes_needed: vote count exceeds "
                                  "practical cap");
    }
    while (hi - lo > 2) {
        Eigen::Index mid = lo + (hi - lo) / 2;
        if (mid % 2 == 0) ++mid;
        if (mid >= hi) mid -= 2;
        if (majority_success_probability(mid, p_single) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace l2fe
