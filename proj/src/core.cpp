#include "l2fe/core.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace l2fe {

void QuantizerConfig::validate() const {
    if (!(min < max)) throw InvalidParameter("quantizer: min must be < max");
    if (!(scale > 0.0) || scale > 1.0)
        throw InvalidParameter("quantizer: scale must be in (0, 1]");
    if (modulus <= 1) throw InvalidParameter("quantizer: modulus must be > 1");
}

IntVector quantize(const Vector& x, const QuantizerConfig& cfg) {
    cfg.validate();
    IntVector out(x.size());
    const double span = cfg.max - cfg.min;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] >= cfg.min && x[i] <= cfg.max))
            throw OutOfRange("quantize: coordinate " + std::to_string(i) +
                             " = " + std::to_string(x[i]) + " outside [" +
                             std::to_string(cfg.min) + ", " +
                             std::to_string(cfg.max) + "]");
        const double scaled =
            (x[i] - cfg.min) / span * static_cast<double>(cfg.modulus) *
            cfg.scale;
        std::int64_t v = static_cast<std::int64_t>(std::floor(scaled));
        v %= cfg.modulus;
        if (v < 0) v += cfg.modulus;
        out[i] = v;
    }
    return out;
}

Matrix gaussian_projection_matrix(Eigen::Index target_dim, Eigen::Index dim,
                                  std::uint64_t seed) {
    SeededRng rng(seed);
    Matrix g(target_dim, dim);
    for (Eigen::Index r = 0; r < target_dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = rng.normal();
    return g / std::sqrt(static_cast<double>(target_dim));
}

Vector random_projection_reduce(const Vector& x, Eigen::Index target_dim,
                                std::uint64_t seed) {
    if (target_dim <= 0 || target_dim >= x.size())
        throw InvalidDimension("random_projection_reduce: target_dim " +
                               std::to_string(target_dim) +
                               " must be in (0, " + std::to_string(x.size()) +
                               ")");
    return gaussian_projection_matrix(target_dim, x.size(), seed) * x;
}

void BallDistributionSpec::validate() const {
    if (dim <= 0 || dim % 2 != 0)
        throw InvalidSpec("ball spec: dimension must be positive and even");
    if (centers.rows() != dim)
        throw InvalidSpec("ball spec: center dimension mismatch");
    if (centers.cols() < 1) throw InvalidSpec("ball spec: need >= 1 center");
    if (!(radius > 0.0)) throw InvalidSpec("ball spec: radius must be > 0");
    if (!(bound > radius))
        throw InvalidSpec("ball spec: bound must exceed radius");
    const double lo = -bound + radius;
    const double hi = bound - radius;
    if (centers.minCoeff() < lo || centers.maxCoeff() > hi)
        throw InvalidSpec("ball spec: center outside [-R+eps, R-eps]^m");
    for (Eigen::Index a = 0; a < centers.cols(); ++a)
        for (Eigen::Index b = a + 1; b < centers.cols(); ++b)
            if ((centers.col(a) - centers.col(b)).norm() <= 2.0 * radius)
                throw InvalidSpec("ball spec: balls " + std::to_string(a) +
                                  " and " + std::to_string(b) +
                                  " are not disjoint");
}

BallDistributionSpec make_ball_spec(Eigen::Index dim, double bound,
                                    Eigen::Index beta, double radius,
                                    std::uint64_t seed) {
    BallDistributionSpec spec;
    spec.dim = dim;
    spec.bound = bound;
    spec.radius = radius;
    spec.seed = seed;
    spec.centers.resize(dim, beta);

    SeededRng rng(mix_seed(seed, 0x63656e74)); // distinct stream for centers
    const double lo = -bound + radius;
    const double hi = bound - radius;
    const int max_attempts = 1000;
    for (Eigen::Index b = 0; b < beta; ++b) {
        bool placed = false;
        for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
            Vector c(dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                c[i] = lo + (hi - lo) * rng.uniform();
            placed = true;
            for (Eigen::Index prev = 0; prev < b && placed; ++prev)
                if ((spec.centers.col(prev) - c).norm() <= 2.0 * radius)
                    placed = false;
            if (placed) spec.centers.col(b) = c;
        }
        if (!placed)
            throw InvalidSpec(
                "make_ball_spec: cannot place " + std::to_string(beta) +
                " disjoint balls of radius " + std::to_string(radius) +
                " in the box; reduce beta or radius");
    }
    spec.validate();
    return spec;
}

Vector uniform_in_ball(Eigen::Index dim, SeededRng& rng) {
    Vector dir(dim);
    double norm_sq = 0.0;
    do {
        for (Eigen::Index i = 0; i < dim; ++i) dir[i] = rng.normal();
        norm_sq = dir.squaredNorm();
    } while (norm_sq == 0.0);
    const double r =
        std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
    return dir * (r / std::sqrt(norm_sq));
}

std::string ball_label(Eigen::Index ball_index) {
    return "u" + std::to_string(ball_index);
}

std::vector<LabeledEmbedding> sample_c_epsilon(const BallDistributionSpec& spec,
                                               Eigen::Index per_ball) {
    spec.validate();
    if (per_ball < 1) throw InvalidParameter("sample_c_epsilon: per_ball < 1");
    std::vector<LabeledEmbedding> out;
    out.reserve(static_cast<std::size_t>(spec.ball_count() * per_ball));
    for (Eigen::Index b = 0; b < spec.ball_count(); ++b) {
        SeededRng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(b)));
        for (Eigen::Index s = 0; s < per_ball; ++s) {
            Vector point =
                spec.centers.col(b) + spec.radius * uniform_in_ball(spec.dim, rng);
            out.push_back({ball_label(b), std::move(point)});
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

std::vector<LabeledEmbedding> load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_embeddings: cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ":1: missing header line");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "id")
        throw ParseError(path + ":1: header must start with 'id'");
    const std::size_t dim = header.size() - 1;

    std::vector<LabeledEmbedding> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != dim + 1)
            throw DimensionMismatch(path + ":" + std::to_string(lineno) +
                                    ": expected " + std::to_string(dim) +
                                    " values, got " +
                                    std::to_string(fields.size() - 1));
        if (fields[0].empty())
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": empty id");
        Vector v(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            const std::string& f = fields[i + 1];
            double value = 0.0;
            const auto [ptr, ec] =
                std::from_chars(f.data(), f.data() + f.size(), value);
            if (ec != std::errc() || ptr != f.data() + f.size() ||
                !std::isfinite(value))
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": bad float '" + f + "'");
            v[static_cast<Eigen::Index>(i)] = value;
        }
        rows.push_back({fields[0], std::move(v)});
    }
    return rows;
}

void export_embeddings(const std::string& path,
                       const std::vector<LabeledEmbedding>& rows) {
    const Eigen::Index dim = rows.empty() ? 0 : rows.front().values.size();
    for (const auto& r : rows)
        if (r.values.size() != dim)
            throw DimensionMismatch("export_embeddings: mixed dimensions");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("export_embeddings: cannot open " + path);
    out << "id";
    for (Eigen::Index i = 0; i < dim; ++i) out << ",v" << i;
    out << "\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.user_id;
        for (Eigen::Index i = 0; i < dim; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", r.values[i]);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("export_embeddings: write failed for " + path);
}

} // namespace l2fe
