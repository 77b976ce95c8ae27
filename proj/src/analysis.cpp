#include "mascyber/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mascyber/errors.hpp"

namespace mascyber {

const char* to_string(PairMethod m) { return m == PairMethod::kalman ? "kalman" : "pbh"; }

PairTestResult kalman_controllable(const Matrix& A, const Matrix& B, std::optional<double> rtol) {
    if (A.rows() != A.cols() || B.rows() != A.rows()) {
        throw ValidationError("controllability pair: A must be square and B must have as many rows as A");
    }
    const Index dim = A.rows();
    const RankResult r = rank_with_tolerance(kalman_matrix(A, B, dim), rtol);
    return {r.rank, dim, r.rank == dim, PairMethod::kalman, r.tolerance_used};
}

namespace {

PairTestResult pbh_impl(const CMatrix& A, const CMatrix& B, std::optional<double> rtol) {
    if (A.rows() != A.cols() || B.rows() != A.rows()) {
        throw ValidationError("controllability pair: A must be square and B must have as many rows as A");
    }
    const Index dim = A.rows();
    PairTestResult out;
    out.method = PairMethod::pbh;
    out.required = dim;
    out.rank = dim;
    if (dim == 0) {
        out.controllable = true;
        return out;
    }
    CMatrix test(dim, dim + B.cols());
    test.rightCols(B.cols()) = B;
    bool first = true;
    for (const Complex& lambda : eigenvalues(A)) {
        test.leftCols(dim) = lambda * CMatrix::Identity(dim, dim) - A;
        const RankResult r = rank_with_tolerance(test, rtol);
        if (first || r.rank < out.rank) {
            out.rank = r.rank;
            out.tolerance_used = r.tolerance_used;
            first = false;
        }
    }
    out.controllable = out.rank == dim;
    return out;
}

// A column counts as zero when its largest entry is below the rank cutoff
// scaled to the whole matrix.
bool has_zero_column(const Matrix& m, std::optional<double> rtol) {
    if (m.cols() == 0) return false;
    const double scale = max_abs(m);
    if (scale == 0.0) return true;
    const double cutoff = rtol ? *rtol * scale : default_rank_tolerance(m.rows(), m.cols(), scale);
    for (Index c = 0; c < m.cols(); ++c) {
        if (m.col(c).cwiseAbs().maxCoeff() <= cutoff) return true;
    }
    return false;
}

std::vector<AttackedAgentPair> attacked_pairs(const CheckMatrices& cm, const LaplacianPartition& part,
                                              std::optional<double> rtol) {
    std::vector<AttackedAgentPair> out;
    for (Index k = 0; k < part.n_attacked(); ++k) {
        const double d = part.D_a(k, k);
        out.push_back({part.attacked_ids[static_cast<std::size_t>(k)], d,
                       kalman_controllable(cm.agent_block(d), cm.H_a, rtol)});
    }
    return out;
}

// Largest Q* (rows * cols) the kernel/image diagnostic will materialize.
constexpr double kMaxDiagnosticEntries = 4.0e6;

}  // namespace

PairTestResult pbh_controllable(const Matrix& A, const Matrix& B, std::optional<double> rtol) {
    return pbh_impl(A.cast<Complex>(), B.cast<Complex>(), rtol);
}

PairTestResult pbh_controllable(const CMatrix& A, const CMatrix& B, std::optional<double> rtol) {
    return pbh_impl(A, B, rtol);
}

FullNetworkReport full_network_check(const NetworkMatrices& nm, const CheckMatrices& cm,
                                     const LaplacianPartition& part, const FullNetworkOptions& opts) {
    const Index dim = nm.state_dim();
    if (dim > opts.max_state_dim && !opts.allow_large) {
        throw ValidationError("full network check: stacked state dimension " + std::to_string(dim) +
                              " exceeds the limit of " + std::to_string(opts.max_state_dim) +
                              " (pass the large-problem override to proceed)");
    }
    const auto rtol = opts.rtol;
    FullNetworkReport rep;
    rep.direct_required = dim;
    rep.attacked_pairs = attacked_pairs(cm, part, rtol);

    if (nm.n_attacked == 0) {
        rep.short_circuited = true;
        rep.agreement_note = "no attacked agents: the adversary has no input channel";
        return rep;
    }

    // Direct Kalman matrix, raw and column-renormalized.
    const Index inputs = nm.B_star.cols();
    Matrix raw(dim, inputs * dim);
    Matrix scaled(dim, inputs * dim);
    {
        Matrix block = nm.B_star;
        Matrix sblock = nm.B_star;
        for (Index k = 0; k < dim; ++k) {
            raw.middleCols(k * inputs, inputs) = block;
            for (Index c = 0; c < sblock.cols(); ++c) {
                const double norm = sblock.col(c).norm();
                if (norm > 0.0) sblock.col(c) /= norm;
            }
            scaled.middleCols(k * inputs, inputs) = sblock;
            if (k + 1 < dim) {
                block = nm.A_star * block;
                sblock = nm.A_star * sblock;
            }
        }
    }
    rep.direct_rank = rank_with_tolerance(raw, rtol);
    rep.direct_verdict = rep.direct_rank.rank == dim;
    rep.scaled_rank = rank_with_tolerance(scaled, rtol);
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Index c = 0; c < raw.cols(); ++c) {
            const double norm = raw.col(c).norm();
            if (norm > 0.0) {
                lo = std::min(lo, norm);
                hi = std::max(hi, norm);
            }
        }
        rep.column_norm_log10_span = hi > 0.0 ? std::log10(hi / lo) : 0.0;
    }

    const Index sa = nm.A_a.rows();
    const Index sf = nm.A_f.rows();
    rep.attacked_kalman_rank = rank_with_tolerance(Matrix(raw.topRows(sa)), rtol).rank;

    if (nm.n_followers == 0) {
        rep.short_circuited = true;
        rep.theorem_verdict = false;
        rep.agreement_note = "no followers: only the direct rank test applies";
        return rep;
    }

    rep.follower_pair = kalman_controllable(nm.A_f, nm.A_fa, rtol);

    // Q_k = A_a^k B_a for k = 0..dim-1; M_k = A_f M_{k-1} + A_fa Q_{k-1}.
    const Index pa = nm.B_a.cols();
    std::vector<Matrix> Q;
    Q.reserve(static_cast<std::size_t>(dim));
    Q.push_back(nm.B_a);
    for (Index k = 1; k < dim; ++k) Q.push_back(nm.A_a * Q.back());
    std::vector<Matrix> M(static_cast<std::size_t>(dim));
    M[0] = Matrix::Zero(sf, pa);
    for (Index k = 1; k < dim; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        M[ku] = nm.A_f * M[ku - 1] + nm.A_fa * Q[ku - 1];
    }

    rep.mk_columns_nonzero = true;
    for (Index k = 1; k < dim; ++k) {
        if (has_zero_column(M[static_cast<std::size_t>(k)], rtol)) {
            rep.mk_columns_nonzero = false;
            rep.mk_first_zero_column_power = k;
            break;
        }
    }

    const Matrix w1 = kernel_basis(Matrix(nm.B_a.transpose()), rtol);
    rep.w1_rows = w1.rows();
    rep.w1_cols = w1.cols();
    Matrix S = Matrix::Zero(sf, w1.cols());
    for (Index k = 1; k < dim; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        S += M[ku] * (Q[ku].transpose() * w1);
    }
    rep.s_rank = rank_with_tolerance(S, rtol);
    rep.s_required = nm.n_followers <= nm.n_attacked ? S.rows() : S.cols();

    const bool pairs_ok = std::all_of(rep.attacked_pairs.begin(), rep.attacked_pairs.end(),
                                      [](const AttackedAgentPair& p) { return p.result.controllable; });
    rep.theorem_verdict = pairs_ok && rep.follower_pair->controllable && rep.mk_columns_nonzero &&
                          rep.s_rank.rank == rep.s_required && rep.s_required > 0;

    // M = M* Q*, with M* = [A_fa, A_f A_fa, ...] and Q* block Toeplitz in Q_k.
    const Index blocks = dim - 1;
    const double qstar_entries = static_cast<double>(sa * blocks) * static_cast<double>(pa * blocks);
    if (blocks > 0 && qstar_entries <= kMaxDiagnosticEntries) {
        Matrix Mstar(sf, sa * blocks);
        Matrix term = nm.A_fa;
        for (Index r = 0; r < blocks; ++r) {
            Mstar.middleCols(r * sa, sa) = term;
            if (r + 1 < blocks) term = nm.A_f * term;
        }
        Matrix Qstar = Matrix::Zero(sa * blocks, pa * blocks);
        for (Index r = 0; r < blocks; ++r) {
            for (Index c = r; c < blocks; ++c) Qstar.block(r * sa, c * pa, sa, pa) = Q[static_cast<std::size_t>(c - r)];
        }
        Matrix Mcat(sf, pa * blocks);
        for (Index k = 1; k < dim; ++k) Mcat.middleCols((k - 1) * pa, pa) = M[static_cast<std::size_t>(k)];
        const Matrix product = Mstar * Qstar;
        const double denom = Mcat.norm();
        rep.factorization_rel_error = denom > 0.0 ? (Mcat - product).norm() / denom : (Mcat - product).norm();
        rep.kernel_image_intersection_dim =
            rank_with_tolerance(Qstar, rtol).rank - rank_with_tolerance(product, rtol).rank;
    }

    std::ostringstream note;
    if (rep.theorem_verdict && rep.direct_verdict) {
        note << "sufficient conditions hold and the direct rank confirms full controllability";
    } else if (rep.theorem_verdict) {
        note << "sufficient conditions hold but the direct rank is " << rep.direct_rank.rank << " of " << dim
             << "; treat the direct rank as authoritative";
    } else if (rep.direct_verdict) {
        note << "sufficient conditions fail, yet the direct rank is full: the conditions are sufficient only";
    } else {
        note << "sufficient conditions fail and the direct rank is " << rep.direct_rank.rank << " of " << dim
             << ": the adversary cannot reach every network state";
    }
    rep.agreement_note = note.str();
    return rep;
}

FollowerReport follower_check(const NetworkMatrices& nm, const LaplacianPartition& part, const CheckMatrices& cm,
                              std::optional<double> rtol) {
    if (nm.n_followers == 0 || nm.n_attacked == 0) {
        throw ValidationError("follower check: needs at least one follower and one attacked agent");
    }
    FollowerReport rep;
    rep.span = check_eigvec_span(part.L_f);
    rep.attacked_pairs = attacked_pairs(cm, part, rtol);
    rep.graph_pair = kalman_controllable(part.L_f, part.l_fa, rtol);

    const CMatrix coupling = cm.coupling().cast<Complex>();
    for (const auto& cluster : rep.span.clusters) {
        rep.modes.push_back(
            {cluster.value, cluster.algebraic, pbh_controllable(cm.agent_block(cluster.value), coupling, rtol)});
    }

    rep.verdict = rep.span.holds && rep.graph_pair.controllable;
    for (const auto& p : rep.attacked_pairs) rep.verdict = rep.verdict && p.result.controllable;
    for (const auto& m : rep.modes) rep.verdict = rep.verdict && m.result.controllable;
    return rep;
}

}  // namespace mascyber
