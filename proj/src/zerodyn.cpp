#include "mascyber/zerodyn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mascyber/errors.hpp"

namespace mascyber {

const char* to_string(PencilKind k) { return k == PencilKind::attacked ? "attacked" : "followers"; }

CMatrix RosenbrockPencil::at(Complex s) const {
    const Index ns = state_dim();
    const Index ni = input_dim();
    const Index no = C.rows();
    CMatrix P = CMatrix::Zero(ns + no, ns + ni);
    P.topLeftCorner(ns, ns) = s * CMatrix::Identity(ns, ns) - A.cast<Complex>();
    P.topRightCorner(ns, ni) = -B.cast<Complex>();
    P.bottomLeftCorner(no, ns) = C.cast<Complex>();
    return P;
}

namespace {

Matrix random_orthonormal_columns(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

// Finite generalized eigenvalues of a randomly squared version of the pencil
// s E - F.
std::vector<Complex> squared_pencil_eigenvalues(const RosenbrockPencil& p, std::mt19937_64& rng) {
    const Index ns = p.state_dim();
    const Index rows = ns + p.C.rows();
    const Index cols = ns + p.input_dim();
    Matrix E = Matrix::Zero(rows, cols);
    E.topLeftCorner(ns, ns).setIdentity();
    Matrix F = Matrix::Zero(rows, cols);
    F.topLeftCorner(ns, ns) = p.A;
    F.topRightCorner(ns, p.input_dim()) = p.B;
    F.bottomLeftCorner(p.C.rows(), ns) = -p.C;

    // QZ occasionally fails to converge; a fresh compression is a different
    // problem with the same finite zeros.
    Matrix Ec;
    Matrix Fc;
    Eigen::GeneralizedEigenSolver<Matrix> ges;
    for (int attempt = 0;; ++attempt) {
        if (rows >= cols) {
            const Matrix W = random_orthonormal_columns(rows, cols, rng).transpose();
            Ec = W * E;
            Fc = W * F;
        } else {
            const Matrix V = random_orthonormal_columns(cols, rows, rng);
            Ec = E * V;
            Fc = F * V;
        }
        ges.compute(Fc, Ec, false);
        if (ges.info() == Eigen::Success) break;
        if (attempt == 3) throw NumericalError("invariant zeros: generalized eigensolver failed");
    }
    const double scale = std::max(1.0, Fc.norm());
    std::vector<Complex> out;
    for (Index k = 0; k < ges.alphas().size(); ++k) {
        const Complex alpha = ges.alphas()(k);
        const double beta = ges.betas()(k);
        if (std::abs(beta) <= 1e-13 * std::max(1.0, Ec.norm())) continue;
        const Complex s = alpha / beta;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || std::abs(s) > 1e8 * scale) continue;
        out.push_back(s);
    }
    return out;
}

double pairing_tolerance(Complex s) { return 1e-6 * (1.0 + std::abs(s)); }

double spectral_norm(const CMatrix& m) {
    const auto sv = rank_with_tolerance(m).singular_values;
    return sv.empty() ? 0.0 : sv.front();
}

}  // namespace

RosenbrockPencil make_pencil(PencilKind kind, Matrix A, Matrix B, Matrix C, const ZeroOptions& opts) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || C.cols() != A.rows()) {
        throw ValidationError("pencil: inconsistent block dimensions");
    }
    RosenbrockPencil p;
    p.kind = kind;
    p.A = std::move(A);
    p.B = std::move(B);
    p.C = std::move(C);
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double radius = 1.0 + max_abs(p.A);
    for (int draw = 0; draw < 3; ++draw) {
        const Complex s(radius * unit(rng), radius * unit(rng));
        p.normal_rank = std::max(p.normal_rank, rank_with_tolerance(p.at(s)).rank);
    }
    return p;
}

RosenbrockPencil attacked_pencil(const NetworkMatrices& nm, const CheckMatrices& cm, const ZeroOptions& opts) {
    const Index na = nm.n_attacked;
    return make_pencil(PencilKind::attacked, nm.A_a, nm.B_a, kron(Matrix::Identity(na, na), cm.C), opts);
}

RosenbrockPencil follower_pencil(const NetworkMatrices& nm, const CheckMatrices& cm, const LaplacianPartition& part,
                                 const ZeroOptions& opts) {
    const Index nf = nm.n_followers;
    return make_pencil(PencilKind::followers, nm.A_f, kron(part.l_fa, cm.coupling()), kron(Matrix::Identity(nf, nf), cm.C),
                       opts);
}

ZeroSet invariant_zeros(const RosenbrockPencil& p, const ZeroOptions& opts) {
    ZeroSet out;
    out.no_input_influence = max_abs(p.B) == 0.0;
    if (p.state_dim() == 0) return out;

    std::mt19937_64 rng(opts.seed);
    const std::vector<Complex> first = squared_pencil_eigenvalues(p, rng);
    const std::vector<Complex> second = squared_pencil_eigenvalues(p, rng);
    out.candidates_first = static_cast<Index>(first.size());
    out.candidates_second = static_cast<Index>(second.size());

    std::vector<bool> used(second.size(), false);
    for (const Complex& s : first) {
        std::size_t best = second.size();
        double best_dist = 0.0;
        for (std::size_t j = 0; j < second.size(); ++j) {
            const double dist = std::abs(second[j] - s);
            if (!used[j] && dist <= pairing_tolerance(s) && (best == second.size() || dist < best_dist)) {
                best = j;
                best_dist = dist;
            }
        }
        if (best == second.size()) continue;
        used[best] = true;
        Complex z = 0.5 * (s + second[best]);
        if (std::abs(z.imag()) <= pairing_tolerance(z)) z.imag(0.0);

        const bool duplicate = std::any_of(out.zeros.begin(), out.zeros.end(), [&](const InvariantZero& q) {
            return std::abs(q.value - z) <= pairing_tolerance(z);
        });
        if (duplicate) continue;
        const Index r = rank_with_tolerance(p.at(z), opts.confirm_rtol).rank;
        if (r < p.normal_rank) out.zeros.push_back({z, r});
    }
    std::sort(out.zeros.begin(), out.zeros.end(), [](const InvariantZero& a, const InvariantZero& b) {
        return a.value.real() != b.value.real() ? a.value.real() < b.value.real() : a.value.imag() < b.value.imag();
    });
    return out;
}

std::vector<ZeroDirection> zero_directions(const RosenbrockPencil& p, Complex zero, const ZeroOptions& opts) {
    const CMatrix P = p.at(zero);
    const CMatrix kernel = kernel_basis(P, opts.confirm_rtol);
    if (kernel.cols() == 0) {
        std::ostringstream msg;
        msg << "zero directions: P(s) has trivial kernel at s = " << zero << "; the zero is inconsistent with the "
            << "rank tolerance";
        throw NumericalError(msg.str());
    }
    const double pnorm = spectral_norm(P);
    std::vector<ZeroDirection> out;
    for (Index k = 0; k < kernel.cols(); ++k) {
        const CVector v = normalize_phase(kernel.col(k));
        ZeroDirection d;
        d.zero = zero;
        d.state_part = v.head(p.state_dim());
        d.input_part = v.tail(p.input_dim());
        d.residual = pnorm > 0.0 ? (P * v).norm() / pnorm : (P * v).norm();
        out.push_back(std::move(d));
    }
    return out;
}

Excitation excitation_feasible(const ZeroDirection& d, const RosenbrockPencil& p) {
    const double input_norm = d.input_part.norm();
    if (input_norm <= 1e-12 * std::max(1.0, d.state_part.norm())) return {false, "attack has no influence"};
    const CVector effect = p.B.cast<Complex>() * d.input_part;
    const double cutoff = 1e-9 * std::max(max_abs(p.B), 1e-300) * input_norm;
    if (effect.norm() <= cutoff) {
        return {false, p.kind == PencilKind::attacked ? "attack input lies in the kernel of the attack channel"
                                                      : "attacked-agent state lies in the kernel of the coupling"};
    }
    return {true, "attack input drives the zero direction"};
}

ZeroAuditReport zero_dynamics_audit(const AuditInputs& in, const ZeroOptions& opts, Index annihilation_samples) {
    ZeroAuditReport rep;
    const Index n = in.dynamics.n();
    const Index na = in.network.n_attacked;
    const Index nf = in.network.n_followers;
    // The assembled block, so that the audit also covers the network model.
    const Matrix& coupling_to_followers = in.network.A_fa;
    const Matrix attacked_outputs = kron(Matrix::Identity(na, na), in.check.C);
    const double coupling_norm = coupling_to_followers.norm();

    const Matrix ker_c = kernel_basis(in.check.C);
    rep.vacuous = ker_c.cols() == 0;
    rep.note = rep.vacuous ? "C has trivial kernel: no output-zeroing state exists, the property holds vacuously"
                           : "C has a nontrivial kernel: zero directions searched";
    const auto report = [&](const std::string& what) {
        ++rep.violations;
        rep.findings.push_back(what);
    };

    // Blockwise annihilation: stacked vectors whose per-agent blocks lie in
    // ker(C) never reach the followers.
    if (na > 0 && nf > 0 && !rep.vacuous) {
        std::mt19937_64 rng(opts.seed + 17);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Index s = 0; s < annihilation_samples; ++s) {
            Vector v(2 * n * na);
            for (Index a = 0; a < na; ++a) {
                Vector coeffs(ker_c.cols());
                for (Index k = 0; k < coeffs.size(); ++k) coeffs(k) = gauss(rng);
                v.segment(a * 2 * n, 2 * n) = ker_c * coeffs;
            }
            const Vector hit = coupling_to_followers * v;
            if (hit.norm() > 1e-10 * std::max(coupling_norm, 1.0) * v.norm()) {
                report("annihilation sample " + std::to_string(s) + " leaks into the followers");
            }
            ++rep.annihilation_samples;
        }
    }

    // The coupling into the followers should factor as (l_fa (x) H) (I (x) C), so an
    // output-zeroing attacked state cannot reach them. For each zero the test
    // takes every attacked state its kernel can produce, keeps the subspace
    // that is output-zeroing, and measures what of it leaks; it works on
    // subspaces, not kernel basis vectors, which mix output-zeroing and
    // observable states arbitrarily.
    const Matrix through = kron(in.partition.l_fa, in.check.H);
    const double leak_scale =
        std::max(spectral_norm(through.cast<Complex>()) * spectral_norm(attacked_outputs.cast<Complex>()), 1e-300);
    const auto leak_check = [&](const std::vector<ZeroDirection>& dirs, bool use_state, const Complex& zero,
                                const char* what) {
        if (dirs.empty() || nf == 0) return;
        CMatrix X(use_state ? dirs.front().state_part.size() : dirs.front().input_part.size(),
                  static_cast<Index>(dirs.size()));
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            X.col(static_cast<Index>(k)) = use_state ? dirs[k].state_part : dirs[k].input_part;
        }
        const Index r = rank_with_tolerance(X, opts.confirm_rtol).rank;
        if (r == 0) return;
        const Eigen::JacobiSVD<CMatrix> svd(X, Eigen::ComputeThinU);
        const CMatrix Q = svd.matrixU().leftCols(r);
        const CMatrix N = kernel_basis(CMatrix(attacked_outputs.cast<Complex>() * Q), opts.confirm_rtol);
        for (Index k = 0; k < N.cols(); ++k) {
            const CVector v = Q * N.col(k);
            const double leak = (coupling_to_followers.cast<Complex>() * v).norm() / (leak_scale * v.norm());
            if (leak > 1e-6) {
                std::ostringstream msg;
                msg << what << " zero " << zero << ": output-zeroing attacked state reaches the followers (relative leak "
                    << leak << "; simultaneous excitation witness)";
                report(msg.str());
            }
        }
    };

    if (na > 0) {
        const RosenbrockPencil pa = attacked_pencil(in.network, in.check, opts);
        const ZeroSet zs = invariant_zeros(pa, opts);
        rep.attacked_zeros = static_cast<Index>(zs.zeros.size());
        for (const auto& z : zs.zeros) {
            const auto dirs = zero_directions(pa, z.value, opts);
            rep.attacked_directions_checked += static_cast<Index>(dirs.size());
            leak_check(dirs, true, z.value, "attacked");
        }
    }

    if (na > 0 && nf > 0) {
        const RosenbrockPencil pf = follower_pencil(in.network, in.check, in.partition, opts);
        const ZeroSet zs = invariant_zeros(pf, opts);
        rep.follower_zeros = static_cast<Index>(zs.zeros.size());
        for (const auto& z : zs.zeros) {
            const auto dirs = zero_directions(pf, z.value, opts);
            rep.follower_directions_checked += static_cast<Index>(dirs.size());
            leak_check(dirs, false, z.value, "follower");
        }
    }
    return rep;
}

}  // namespace mascyber
