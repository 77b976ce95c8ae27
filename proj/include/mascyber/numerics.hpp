#pragma once

// Dense matrix kernel shared by every analysis module.
//
// All routines accept real inputs and, where eigenstructure is involved,
// return complex results. Rank decisions go through a single tolerance
// policy so every reported rank can be audited against the cutoff used.

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mascyber {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct RankResult {
    Index rank = 0;
    std::vector<double> singular_values;  // nonincreasing
    double tolerance_used = 0.0;
};

struct EigenPair {
    Complex value;
    CVector vector;  // unit norm, first nonzero component real positive
};

// Kronecker product, (a.rows*b.rows) x (a.cols*b.cols).
Matrix kron(const Matrix& a, const Matrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Dimension-scaled machine-epsilon cutoff: max(rows, cols) * eps * s_max.
double default_rank_tolerance(Index rows, Index cols, double largest_singular_value);

// Rank as the number of singular values strictly above the cutoff. Without
// rtol the cutoff is default_rank_tolerance; with rtol it is rtol * s_max.
// An empty matrix has rank 0.
RankResult rank_with_tolerance(const Matrix& m, std::optional<double> rtol = std::nullopt);
RankResult rank_with_tolerance(const CMatrix& m, std::optional<double> rtol = std::nullopt);

// Same decision as rank_with_tolerance, but with an absolute cutoff.
RankResult rank_with_absolute_tolerance(const CMatrix& m, double abs_tol);

// Orthonormal basis (as columns) of the null space of m under the same
// tolerance policy as rank_with_tolerance. Zero columns when the kernel is
// trivial.
Matrix kernel_basis(const Matrix& m, std::optional<double> rtol = std::nullopt);
CMatrix kernel_basis(const CMatrix& m, std::optional<double> rtol = std::nullopt);
CMatrix kernel_basis_absolute(const CMatrix& m, double abs_tol);

// All eigenpairs of a real square matrix.
std::vector<EigenPair> eig(const Matrix& m);
// Eigenvalues only, for real or complex square input.
std::vector<Complex> eigenvalues(const Matrix& m);
std::vector<Complex> eigenvalues(const CMatrix& m);

// Scale v so that it has unit norm and its first component whose modulus
// exceeds 1e-12 of the largest one is real and positive.
CVector normalize_phase(const CVector& v);

Matrix block_diag(std::span<const Matrix> blocks);

// Largest absolute entry; 0 for empty matrices.
double max_abs(const Matrix& m);
double max_abs(const CMatrix& m);

// Throws ValidationError naming `what` if m holds NaN or Inf.
void require_finite(const Matrix& m, const char* what);

}  // namespace mascyber
