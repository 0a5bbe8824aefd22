#include "l2fe/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace l2fe {

namespace {

// Round half away from zero; coefficient ties must not vary by platform.
double round_half_away(double x) {
    return std::copysign(std::floor(std::abs(x) + 0.5), x);
}

// Nearest point of D8 = {x in Z^8 : sum even} under round-half-down with
// deterministic tie handling: when the parity flip has several minimal-cost
// options, a down-flip at the earliest position is preferred, otherwise the
// up-flip at the latest position. This yields the lexicographically smallest
// nearest point.
std::array<std::int64_t, 8> decode_d8(const Eigen::Matrix<double, 8, 1>& v) {
    std::array<std::int64_t, 8> r{};
    std::array<double, 8> delta{};
    std::int64_t parity = 0;
    for (int i = 0; i < 8; ++i) {
        const double rounded = std::ceil(v[i] - 0.5); // ties round down
        r[i] = static_cast<std::int64_t>(rounded);
        delta[i] = v[i] - rounded; // in (-1/2, 1/2]
        parity += r[i];
    }
    if (parity % 2 == 0) return r;

    double best_cost = std::numeric_limits<double>::infinity();
    int best_index = -1;
    bool best_is_down = false;
    for (int i = 0; i < 8; ++i) {
        const double up = 1.0 - 2.0 * delta[i];
        const double down = 1.0 + 2.0 * delta[i];
        if (down < best_cost || (down == best_cost && !best_is_down)) {
            best_cost = down;
            best_index = i;
            best_is_down = true;
        }
        if (up < best_cost) {
            best_cost = up;
            best_index = i;
            best_is_down = false;
        } else if (up == best_cost && !best_is_down) {
            best_index = i; // latest up-flip wins
        }
    }
    r[best_index] += best_is_down ? -1 : 1;
    return r;
}

double dist_sq_doubled(const Eigen::Matrix<double, 8, 1>& v,
                       const std::array<std::int64_t, 8>& doubled) {
    double d = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double e = v[i] - 0.5 * static_cast<double>(doubled[i]);
        d += e * e;
    }
    return d;
}

} // namespace

bool is_e8_point(const E8Point& p) {
    std::int64_t sum = 0;
    const bool odd = (p.doubled[0] & 1) != 0;
    for (int i = 0; i < 8; ++i) {
        if (((p.doubled[i] & 1) != 0) != odd) return false;
        sum += p.doubled[i];
    }
    return ((sum % 4) + 4) % 4 == 0;
}

E8Point decode_e8_block(const Eigen::Matrix<double, 8, 1>& v) {
    if (!v.allFinite()) throw InvalidInput("decode_e8_block: non-finite input");

    E8Point integer_coset;
    {
        const auto d = decode_d8(v);
        for (int i = 0; i < 8; ++i) integer_coset.doubled[i] = 2 * d[i];
    }
    E8Point half_coset;
    {
        Eigen::Matrix<double, 8, 1> shifted = v.array() - 0.5;
        const auto d = decode_d8(shifted);
        for (int i = 0; i < 8; ++i) half_coset.doubled[i] = 2 * d[i] + 1;
    }
    // Ties go to the integer coset.
    return dist_sq_doubled(v, integer_coset.doubled) <=
                   dist_sq_doubled(v, half_coset.doubled)
               ? integer_coset
               : half_coset;
}

Vector decode_e8(const Vector& v) {
    if (v.size() % 8 != 0)
        throw InvalidDimension("decode_e8: dimension " +
                               std::to_string(v.size()) +
                               " not divisible by 8");
    Vector out(v.size());
    for (Eigen::Index b = 0; b < v.size() / 8; ++b) {
        Eigen::Matrix<double, 8, 1> block = v.segment<8>(8 * b);
        out.segment<8>(8 * b) = decode_e8_block(block).coords();
    }
    return out;
}

std::int64_t mod_q(std::int64_t v, std::int64_t q) {
    std::int64_t r = v % q;
    return r < 0 ? r + q : r;
}

std::int64_t centered_lift(std::int64_t v, std::int64_t q) {
    std::int64_t r = mod_q(v, q);
    return r > q / 2 ? r - q : r;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t q) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = q, new_r = mod_q(a, q);
    while (new_r != 0) {
        const std::int64_t quot = r / new_r;
        t = std::exchange(new_t, t - quot * new_t);
        r = std::exchange(new_r, r - quot * new_r);
    }
    if (r != 1)
        throw InvalidParameter("mod_inverse: " + std::to_string(a) +
                               " not invertible mod " + std::to_string(q));
    return mod_q(t, q);
}

namespace {

// Gauss-Jordan inverse mod q of an l x l block. Entries in [0, q).
IntMatrix mod_inverse_matrix(const IntMatrix& t, std::int64_t q) {
    const Eigen::Index l = t.rows();
    IntMatrix work = t;
    IntMatrix inv = IntMatrix::Identity(l, l);
    for (Eigen::Index col = 0; col < l; ++col) {
        Eigen::Index pivot = -1;
        for (Eigen::Index row = col; row < l; ++row)
            if (mod_q(work(row, col), q) != 0) {
                pivot = row;
                break;
            }
        if (pivot < 0) throw RankDeficient("mod_inverse_matrix: singular");
        work.row(col).swap(work.row(pivot));
        inv.row(col).swap(inv.row(pivot));
        const std::int64_t scale = mod_inverse(work(col, col), q);
        for (Eigen::Index j = 0; j < l; ++j) {
            work(col, j) = mod_q(work(col, j) * scale, q);
            inv(col, j) = mod_q(inv(col, j) * scale, q);
        }
        for (Eigen::Index row = 0; row < l; ++row) {
            if (row == col) continue;
            const std::int64_t f = mod_q(work(row, col), q);
            if (f == 0) continue;
            for (Eigen::Index j = 0; j < l; ++j) {
                work(row, j) = mod_q(work(row, j) - f * work(col, j), q);
                inv(row, j) = mod_q(inv(row, j) - f * inv(col, j), q);
            }
        }
    }
    return inv;
}

} // namespace

QaryLatticeBasis build_qary_basis(const IntMatrix& a, std::int64_t q) {
    const Eigen::Index m = a.rows();
    const Eigen::Index l = a.cols();
    if (l < 1 || m <= l)
        throw InvalidParameter("build_qary_basis: need 1 <= l < m");
    if (q < 2) throw InvalidParameter("build_qary_basis: modulus < 2");

    IntMatrix reduced(m, l);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < l; ++c) reduced(r, c) = mod_q(a(r, c), q);

    // Row elimination to locate an invertible l x l block.
    IntMatrix work = reduced;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    for (Eigen::Index col = 0; col < l; ++col) {
        Eigen::Index pivot = -1;
        for (Eigen::Index row = col; row < m; ++row)
            if (work(row, col) != 0) {
                pivot = row;
                break;
            }
        if (pivot < 0)
            throw RankDeficient("build_qary_basis: rank(A) < l mod q");
        work.row(col).swap(work.row(pivot));
        std::swap(order[static_cast<std::size_t>(col)],
                  order[static_cast<std::size_t>(pivot)]);
        const std::int64_t scale = mod_inverse(work(col, col), q);
        for (Eigen::Index j = 0; j < l; ++j)
            work(col, j) = mod_q(work(col, j) * scale, q);
        for (Eigen::Index row = col + 1; row < m; ++row) {
            const std::int64_t f = work(row, col);
            if (f == 0) continue;
            for (Eigen::Index j = 0; j < l; ++j)
                work(row, j) = mod_q(work(row, j) - f * work(col, j), q);
        }
    }

    QaryLatticeBasis out;
    out.source = reduced;
    out.modulus = q;
    out.pivot_rows.assign(order.begin(), order.begin() + l);

    IntMatrix top(l, l);
    for (Eigen::Index k = 0; k < l; ++k)
        top.row(k) = reduced.row(out.pivot_rows[static_cast<std::size_t>(k)]);
    out.top_inv = mod_inverse_matrix(top, q);

    std::vector<Eigen::Index> bottom_rows(order.begin() + l, order.end());
    // H = A_bottom * T^-1 mod q, in the permuted frame.
    IntMatrix h(m - l, l);
    for (Eigen::Index r = 0; r < m - l; ++r)
        for (Eigen::Index c = 0; c < l; ++c) {
            std::int64_t acc = 0;
            for (Eigen::Index k = 0; k < l; ++k)
                acc += reduced(bottom_rows[static_cast<std::size_t>(r)], k) *
                       out.top_inv(k, c);
            h(r, c) = mod_q(acc, q);
        }

    // Columns ordered q-block first, then the unit/H block. This order keeps
    // Gram-Schmidt exactly conditioned (profile: m-l vectors of norm q, then
    // l unit vectors); the reverse order collapses the trailing b* norms at
    // real parameter sizes and floating-point BNP stops decoding even exact
    // lattice points.
    out.basis = IntMatrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m - l; ++j)
        out.basis(bottom_rows[static_cast<std::size_t>(j)], j) = q;
    for (Eigen::Index j = 0; j < l; ++j) {
        out.basis(out.pivot_rows[static_cast<std::size_t>(j)], m - l + j) = 1;
        for (Eigen::Index r = 0; r < m - l; ++r)
            out.basis(bottom_rows[static_cast<std::size_t>(r)], m - l + j) =
                h(r, j);
    }
    return out;
}

GramSchmidtData gram_schmidt(const IntMatrix& basis) {
    const Eigen::Index m = basis.rows();
    if (basis.cols() != m)
        throw InvalidParameter("gram_schmidt: basis must be square");

    const Matrix b = basis.cast<double>();
    GramSchmidtData gs;
    gs.orthogonal.resize(m, m);
    gs.mu = Matrix::Zero(m, m);
    gs.norms_sq.resize(m);

    double max_col_norm = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        max_col_norm = std::max(max_col_norm, b.col(i).norm());
    const double rank_tol = 1e-9 * max_col_norm;

    for (Eigen::Index i = 0; i < m; ++i) {
        Vector star = b.col(i);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double mu_ij = star.dot(gs.orthogonal.col(j)) / gs.norms_sq[j];
            gs.mu(i, j) = mu_ij;
            star -= mu_ij * gs.orthogonal.col(j);
        }
        const double n2 = star.squaredNorm();
        if (!(n2 > rank_tol * rank_tol))
            throw RankDeficient("gram_schmidt: column " + std::to_string(i) +
                                " is linearly dependent");
        gs.orthogonal.col(i) = star;
        gs.norms_sq[i] = n2;
        gs.mu(i, i) = 1.0;
    }
    return gs;
}

GramSchmidtData qary_gram_schmidt(const QaryLatticeBasis& basis) {
    const Eigen::Index m = basis.dim();
    const Eigen::Index l = basis.secret_dim();
    const std::int64_t q = basis.modulus;
    const double qd = static_cast<double>(q);

    std::vector<Eigen::Index> bottom_rows;
    {
        std::vector<bool> is_pivot(static_cast<std::size_t>(m), false);
        for (Eigen::Index p : basis.pivot_rows)
            is_pivot[static_cast<std::size_t>(p)] = true;
        for (Eigen::Index r = 0; r < m; ++r)
            if (!is_pivot[static_cast<std::size_t>(r)]) bottom_rows.push_back(r);
    }

    GramSchmidtData gs;
    gs.orthogonal = Matrix::Zero(m, m);
    gs.mu = Matrix::Zero(m, m);
    gs.norms_sq.resize(m);
    for (Eigen::Index j = 0; j < m - l; ++j) {
        gs.orthogonal(bottom_rows[static_cast<std::size_t>(j)], j) = qd;
        gs.norms_sq[j] = qd * qd;
        gs.mu(j, j) = 1.0;
    }
    for (Eigen::Index i = 0; i < l; ++i) {
        const Eigen::Index col = m - l + i;
        gs.orthogonal(basis.pivot_rows[static_cast<std::size_t>(i)], col) = 1.0;
        gs.norms_sq[col] = 1.0;
        gs.mu(col, col) = 1.0;
        for (Eigen::Index j = 0; j < m - l; ++j)
            gs.mu(col, j) =
                static_cast<double>(basis.basis(
                    bottom_rows[static_cast<std::size_t>(j)], col)) /
                qd;
    }
    return gs;
}

void size_reduce(IntMatrix& basis, GramSchmidtData& gs) {
    const Eigen::Index m = basis.rows();
    for (Eigen::Index i = 1; i < m; ++i)
        for (Eigen::Index j = i - 1; j >= 0; --j) {
            const double r = round_half_away(gs.mu(i, j));
            if (r == 0.0) continue;
            const auto ri = static_cast<std::int64_t>(r);
            basis.col(i) -= ri * basis.col(j);
            for (Eigen::Index k = 0; k < j; ++k)
                gs.mu(i, k) -= r * gs.mu(j, k);
            gs.mu(i, j) -= r;
        }
}

BabaiResult babai_nearest_plane(const QaryLatticeBasis& basis,
                                const GramSchmidtData& gs,
                                const Vector& target) {
    const Eigen::Index m = basis.dim();
    if (target.size() != m)
        throw DimensionMismatch("babai_nearest_plane: target dimension " +
                                std::to_string(target.size()) + " != " +
                                std::to_string(m));
    if (gs.dim() != m)
        throw DimensionMismatch("babai_nearest_plane: basis/gs mismatch");

    Vector residual = target;
    IntVector coeff(m);
    const Matrix bd = basis.basis.cast<double>();
    for (Eigen::Index i = m - 1; i >= 0; --i) {
        const double c =
            round_half_away(residual.dot(gs.orthogonal.col(i)) / gs.norms_sq[i]);
        coeff[i] = static_cast<std::int64_t>(c);
        residual -= c * bd.col(i);
    }
    BabaiResult out;
    out.coefficients = coeff;
    out.lattice_point = basis.basis * coeff;
    return out;
}

IntVector coefficients_from_pivots(const QaryLatticeBasis& basis,
                                   const IntVector& lattice_point) {
    const Eigen::Index l = basis.secret_dim();
    const std::int64_t q = basis.modulus;
    IntVector top(l);
    for (Eigen::Index k = 0; k < l; ++k)
        top[k] = mod_q(lattice_point[basis.pivot_rows[static_cast<std::size_t>(k)]], q);
    IntVector s(l);
    for (Eigen::Index r = 0; r < l; ++r) {
        std::int64_t acc = 0;
        for (Eigen::Index k = 0; k < l; ++k)
            acc = mod_q(acc + basis.top_inv(r, k) * top[k], q);
        s[r] = acc;
    }
    return s;
}

IntVector recover_coefficients(const QaryLatticeBasis& basis,
                               const IntVector& lattice_point) {
    if (lattice_point.size() != basis.dim())
        throw DimensionMismatch("recover_coefficients: dimension mismatch");
    const IntVector s = coefficients_from_pivots(basis, lattice_point);
    const std::int64_t q = basis.modulus;
    for (Eigen::Index r = 0; r < basis.dim(); ++r) {
        std::int64_t acc = 0;
        for (Eigen::Index k = 0; k < basis.secret_dim(); ++k)
            acc = mod_q(acc + basis.source(r, k) * s[k], q);
        if (acc != mod_q(lattice_point[r], q))
            throw NotInLattice("recover_coefficients: point is not in the "
                               "lattice (row " +
                               std::to_string(r) + ")");
    }
    return s;
}

double bnp_error_bound(const GramSchmidtData& gs) {
    return 0.5 * std::sqrt(gs.norms_sq.minCoeff());
}

} // namespace l2fe
