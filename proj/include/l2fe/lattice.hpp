#pragma once

#include "l2fe/errors.hpp"
#include "l2fe/types.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace l2fe {

// --- E8 -------------------------------------------------------------------
//
// E8 = D8 u (D8 + (1/2,...,1/2)) with D8 = {x in Z^8 : sum x_i even}.
// Points are stored with doubled coordinates so both cosets are exact
// integers: all entries even (integer coset) or all odd (glue coset), and
// the doubled coordinate sum is divisible by 4.

struct E8Point {
    std::array<std::int64_t, 8> doubled{};

    Eigen::Matrix<double, 8, 1> coords() const {
        Eigen::Matrix<double, 8, 1> v;
        for (int i = 0; i < 8; ++i) v[i] = 0.5 * static_cast<double>(doubled[i]);
        return v;
    }
};

bool is_e8_point(const E8Point& p);

// Nearest E8 point to v in l2. Ties break toward the integer coset, then to
// the lexicographically smallest point. Uses the two-coset method: decode to
// D8 and to D8 + (1/2,...,1/2), keep the closer.
E8Point decode_e8_block(const Eigen::Matrix<double, 8, 1>& v);

// Blockwise E8 decode of an m-vector, m divisible by 8.
Vector decode_e8(const Vector& v);

// --- q-ary lattice ----------------------------------------------------------
//
// Lambda_q(A) = {v in Z^m : v = A s (mod q), s in Z_q^l}. The basis is kept
// in the original coordinate order; pivot_rows lists the l rows of A that
// form an invertible block mod q, and top_inv is that block's inverse mod q
// (both needed to recover s from a lattice point).

struct QaryLatticeBasis {
    IntMatrix basis;     // m x m, columns generate the lattice
    IntMatrix source;    // A, m x l, entries in [0, q)
    std::int64_t modulus = 0;
    std::vector<Eigen::Index> pivot_rows; // l row indices of the pivot block
    IntMatrix top_inv;   // l x l inverse of A[pivot_rows, :] mod q

    Eigen::Index dim() const { return basis.rows(); }
    Eigen::Index secret_dim() const { return source.cols(); }
};

// Basis [[I, 0], [H, qI]] in pivot-permuted coordinates, mapped back to the
// original row order. Throws RankDeficient when rank(A) < l mod q; callers
// resample A.
QaryLatticeBasis build_qary_basis(const IntMatrix& a, std::int64_t q);

// Classical Gram-Schmidt (no normalization) over the basis columns.
struct GramSchmidtData {
    Matrix orthogonal;  // columns b*_i
    Matrix mu;          // lower triangular, mu(i,j) = <b_i, b*_j>/|b*_j|^2
    Vector norms_sq;    // |b*_i|^2

    Eigen::Index dim() const { return orthogonal.rows(); }
};

GramSchmidtData gram_schmidt(const IntMatrix& basis);

// Exact Gram-Schmidt data for the structured [qI | I/H] basis produced by
// build_qary_basis: the q-block columns are mutually orthogonal and the
// unit-block columns orthogonalize to exact unit vectors on the pivot rows.
// Floating-point GS leaves ~1e-11 contamination there, which the decoder's
// growing residuals amplify past the rounding threshold at real parameter
// sizes; the closed form keeps nearest-plane decoding of exact lattice
// points exact.
GramSchmidtData qary_gram_schmidt(const QaryLatticeBasis& basis);

// In-place size reduction of the basis (|mu(i,j)| <= 1/2 afterwards), with
// the Gram-Schmidt data updated to match. Off by default in the schemes;
// decoding accuracy is measured empirically either way.
void size_reduce(IntMatrix& basis, GramSchmidtData& gs);

// Babai's nearest-plane on target; exact whenever the error's component
// along every b*_i is below |b*_i|/2. Rounding ties go half-away-from-zero.
// Returns the lattice point (exact integers) and its basis coefficients.
struct BabaiResult {
    IntVector lattice_point;
    IntVector coefficients;
};

BabaiResult babai_nearest_plane(const QaryLatticeBasis& basis,
                                const GramSchmidtData& gs,
                                const Vector& target);

// s in Z_q^l with A s = point (mod q); NotInLattice if no such s exists.
IntVector recover_coefficients(const QaryLatticeBasis& basis,
                               const IntVector& lattice_point);

// Same solve but skipping the membership check: always produces the best
// coefficients implied by the pivot rows. Used where a wrong-but-well-formed
// answer is required instead of an error.
IntVector coefficients_from_pivots(const QaryLatticeBasis& basis,
                                   const IntVector& lattice_point);

// min_i |b*_i| / 2: errors of norm below this decode exactly.
double bnp_error_bound(const GramSchmidtData& gs);

// Modular helpers shared with the schemes.
std::int64_t mod_q(std::int64_t v, std::int64_t q);
std::int64_t mod_inverse(std::int64_t a, std::int64_t q);
bool is_prime(std::int64_t n);

// Representative of v mod q in (-q/2, q/2].
std::int64_t centered_lift(std::int64_t v, std::int64_t q);

} // namespace l2fe
