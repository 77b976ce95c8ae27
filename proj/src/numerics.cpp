#include "mascyber/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mascyber/errors.hpp"

namespace mascyber {

namespace {

template <typename M>
M kron_impl(const M& a, const M& b) {
    M out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

template <typename M>
Eigen::BDCSVD<M> checked_svd(const M& m, unsigned int options) {
    Eigen::BDCSVD<M> svd(m, options);
    if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
        throw NumericalError("singular value decomposition failed");
    }
    return svd;
}

std::vector<double> to_list(const Eigen::VectorXd& s) { return {s.data(), s.data() + s.size()}; }

template <typename M>
RankResult rank_impl(const M& m, std::optional<double> rtol, std::optional<double> abs_tol) {
    RankResult out;
    if (m.size() == 0) return out;
    auto svd = checked_svd(m, 0);
    const Eigen::VectorXd& s = svd.singularValues();
    out.singular_values = to_list(s);
    const double smax = s.size() > 0 ? s(0) : 0.0;
    if (abs_tol) {
        out.tolerance_used = *abs_tol;
    } else if (rtol) {
        out.tolerance_used = *rtol * smax;
    } else {
        out.tolerance_used = default_rank_tolerance(m.rows(), m.cols(), smax);
    }
    out.rank = static_cast<Index>(
        std::count_if(s.data(), s.data() + s.size(), [&](double v) { return v > out.tolerance_used; }));
    return out;
}

template <typename M>
M kernel_impl(const M& m, std::optional<double> rtol, std::optional<double> abs_tol) {
    const Index cols = m.cols();
    if (cols == 0) return M(0, 0);
    if (m.rows() == 0) return M::Identity(cols, cols);
    auto svd = checked_svd(m, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    double tol = 0.0;
    if (abs_tol) {
        tol = *abs_tol;
    } else if (rtol) {
        tol = *rtol * smax;
    } else {
        tol = default_rank_tolerance(m.rows(), m.cols(), smax);
    }
    Index rank = 0;
    while (rank < s.size() && s(rank) > tol) ++rank;
    return svd.matrixV().rightCols(cols - rank);
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) { return kron_impl(a, b); }
CMatrix kron(const CMatrix& a, const CMatrix& b) { return kron_impl(a, b); }

double default_rank_tolerance(Index rows, Index cols, double largest_singular_value) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
           largest_singular_value;
}

RankResult rank_with_tolerance(const Matrix& m, std::optional<double> rtol) {
    return rank_impl(m, rtol, std::nullopt);
}

RankResult rank_with_tolerance(const CMatrix& m, std::optional<double> rtol) {
    return rank_impl(m, rtol, std::nullopt);
}

RankResult rank_with_absolute_tolerance(const CMatrix& m, double abs_tol) {
    return rank_impl(m, std::nullopt, abs_tol);
}

Matrix kernel_basis(const Matrix& m, std::optional<double> rtol) {
    return kernel_impl(m, rtol, std::nullopt);
}

CMatrix kernel_basis(const CMatrix& m, std::optional<double> rtol) {
    return kernel_impl(m, rtol, std::nullopt);
}

CMatrix kernel_basis_absolute(const CMatrix& m, double abs_tol) {
    return kernel_impl(m, std::nullopt, abs_tol);
}

namespace {

struct RealEigen {
    CVector values;
    CMatrix vectors;
};

// Eigen's real Schur iteration occasionally stalls on small structured
// matrices (a 5x5 grounded Laplacian is enough); the complex QR iteration
// does not, so it serves as the fallback. Imaginary parts it leaves on real
// eigenvalues are cleared when they are at round-off level.
RealEigen solve_real(const Matrix& m, bool with_vectors, const char* who) {
    Eigen::EigenSolver<Matrix> real(m, with_vectors);
    if (real.info() == Eigen::Success) {
        return {real.eigenvalues(), with_vectors ? CMatrix(real.eigenvectors()) : CMatrix()};
    }
    Eigen::ComplexEigenSolver<CMatrix> cplx(m.cast<Complex>(), with_vectors);
    if (cplx.info() != Eigen::Success) throw NumericalError(std::string(who) + ": eigensolver did not converge");
    RealEigen out{cplx.eigenvalues(), with_vectors ? CMatrix(cplx.eigenvectors()) : CMatrix()};
    const double floor = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
    for (Index k = 0; k < out.values.size(); ++k) {
        if (std::abs(out.values(k).imag()) <= floor) out.values(k) = out.values(k).real();
    }
    return out;
}

}  // namespace

std::vector<EigenPair> eig(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("eig: matrix must be square");
    std::vector<EigenPair> out;
    if (m.size() == 0) return out;
    const RealEigen e = solve_real(m, true, "eig");
    out.reserve(static_cast<std::size_t>(e.values.size()));
    for (Index k = 0; k < e.values.size(); ++k) {
        if (!std::isfinite(e.values(k).real()) || !std::isfinite(e.values(k).imag())) {
            throw NumericalError("eig: non-finite eigenvalue");
        }
        out.push_back({e.values(k), normalize_phase(e.vectors.col(k))});
    }
    return out;
}

std::vector<Complex> eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("eigenvalues: matrix must be square");
    if (m.size() == 0) return {};
    const CVector v = solve_real(m, false, "eigenvalues").values;
    return {v.data(), v.data() + v.size()};
}

std::vector<Complex> eigenvalues(const CMatrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("eigenvalues: matrix must be square");
    if (m.size() == 0) return {};
    Eigen::ComplexEigenSolver<CMatrix> solver(m, false);
    if (solver.info() != Eigen::Success) throw NumericalError("eigenvalues: eigensolver did not converge");
    const CVector v = solver.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

CVector normalize_phase(const CVector& v) {
    const double norm = v.norm();
    if (norm == 0.0) return v;
    CVector out = v / norm;
    const double cutoff = 1e-12 * out.cwiseAbs().maxCoeff();
    for (Index i = 0; i < out.size(); ++i) {
        if (std::abs(out(i)) > cutoff) {
            out *= std::conj(out(i)) / std::abs(out(i));
            out(i) = Complex(std::abs(out(i)), 0.0);
            break;
        }
    }
    return out;
}

Matrix block_diag(std::span<const Matrix> blocks) {
    Index rows = 0;
    Index cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Matrix out = Matrix::Zero(rows, cols);
    Index r = 0;
    Index c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw ValidationError(std::string(what) + ": entries must be finite");
}

}  // namespace mascyber
