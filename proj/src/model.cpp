#include "mascyber/model.hpp"

#include <string>

#include "mascyber/errors.hpp"

namespace mascyber {

namespace {

void expect_shape(const Matrix& m, Index rows, Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        throw ValidationError(std::string(name) + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                              ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

template <typename M>
M kalman_impl(const M& A, const M& B, Index powers) {
    if (A.rows() != A.cols()) throw ValidationError("kalman matrix: A must be square");
    if (B.rows() != A.rows()) throw ValidationError("kalman matrix: B must have as many rows as A");
    M out(A.rows(), B.cols() * powers);
    M block = B;
    for (Index k = 0; k < powers; ++k) {
        out.middleCols(k * B.cols(), B.cols()) = block;
        if (k + 1 < powers) block = A * block;
    }
    return out;
}

}  // namespace

void check_dimensions(const AgentDynamics& d) {
    const Index n = d.A.rows();
    if (n == 0) throw ValidationError("A: must be nonempty");
    expect_shape(d.A, n, n, "A");
    if (d.B.rows() != n) expect_shape(d.B, n, d.B.cols(), "B");
    const Index m = d.B.cols();
    if (d.C.cols() != n) expect_shape(d.C, d.C.rows(), n, "C");
    const Index p = d.C.rows();
    expect_shape(d.H, n, p, "H");
    expect_shape(d.K, m, n, "K");
    require_finite(d.A, "A");
    require_finite(d.B, "B");
    require_finite(d.C, "C");
    require_finite(d.H, "H");
    require_finite(d.K, "K");
}

Matrix kalman_matrix(const Matrix& A, const Matrix& B, Index powers) { return kalman_impl(A, B, powers); }
CMatrix kalman_matrix(const CMatrix& A, const CMatrix& B, Index powers) { return kalman_impl(A, B, powers); }

DynamicsValidation validate_dynamics(const AgentDynamics& d, std::optional<double> rtol) {
    check_dimensions(d);
    const Index n = d.n();
    DynamicsValidation v;
    v.controllability = rank_with_tolerance(kalman_matrix(d.A, d.B, n), rtol);
    const Matrix obs = kalman_matrix(Matrix(d.A.transpose()), Matrix(d.C.transpose()), n).transpose();
    v.observability = rank_with_tolerance(obs, rtol);
    v.observer_gain = rank_with_tolerance(d.H, rtol);
    v.controllable = v.controllability.rank == n;
    v.observable = v.observability.rank == n;
    v.gain_full_column_rank = v.observer_gain.rank == std::min(n, d.p());
    return v;
}

CMatrix CheckMatrices::agent_block(Complex lambda) const {
    return closed_loop().cast<Complex>() + lambda * coupling().cast<Complex>();
}

CheckMatrices build_check_matrices(const AgentDynamics& d) {
    check_dimensions(d);
    const Index n = d.n();
    const Index m = d.m();
    const Index p = d.p();
    CheckMatrices cm;
    cm.A = Matrix::Zero(2 * n, 2 * n);
    cm.A.topLeftCorner(n, n) = d.A;
    cm.A.bottomRightCorner(n, n) = d.A;

    cm.B = Matrix::Zero(2 * n, 2 * m);
    cm.B.topRightCorner(n, m) = d.B;
    cm.B.bottomRightCorner(n, m) = d.B;

    cm.H = Matrix::Zero(2 * n, 2 * p);
    cm.H.bottomLeftCorner(n, p) = -d.H;
    cm.H.bottomRightCorner(n, p) = d.H;

    cm.H_a = Matrix::Zero(2 * n, p);
    cm.H_a.bottomRows(n) = d.H;

    cm.K = Matrix::Zero(2 * m, 2 * n);
    cm.K.topLeftCorner(m, n) = d.K;
    cm.K.bottomRightCorner(m, n) = d.K;

    cm.C = Matrix::Zero(2 * p, 2 * n);
    cm.C.topLeftCorner(p, n) = d.C;
    cm.C.bottomRightCorner(p, n) = d.C;
    return cm;
}

NetworkMatrices build_network_matrices(const CheckMatrices& cm, const LaplacianPartition& part) {
    const Index two_n = cm.A.rows();
    NetworkMatrices nm;
    nm.n = two_n / 2;
    nm.p = cm.H_a.cols();
    nm.n_followers = part.n_followers();
    nm.n_attacked = part.n_attacked();
    nm.degenerate = nm.n_followers == 0 || nm.n_attacked == 0;

    const Matrix closed = cm.closed_loop();
    const Matrix hc = cm.coupling();
    const Index na = nm.n_attacked;
    const Index nf = nm.n_followers;

    nm.A_a = kron(Matrix::Identity(na, na), closed) + kron(part.D_a, hc);
    nm.B_a = kron(Matrix::Identity(na, na), cm.H_a);
    nm.A_f = kron(Matrix::Identity(nf, nf), closed) + kron(part.L_f, hc);
    nm.A_fa = kron(part.l_fa, hc);

    const Index sa = nm.A_a.rows();
    const Index sf = nm.A_f.rows();
    nm.A_star = Matrix::Zero(sa + sf, sa + sf);
    nm.A_star.topLeftCorner(sa, sa) = nm.A_a;
    nm.A_star.bottomLeftCorner(sf, sa) = nm.A_fa;
    nm.A_star.bottomRightCorner(sf, sf) = nm.A_f;
    nm.B_star = Matrix::Zero(sa + sf, nm.B_a.cols());
    nm.B_star.topRows(sa) = nm.B_a;

    nm.attacked_blocks_match = true;
    for (Index k = 0; k < na; ++k) {
        nm.attacked_blocks.push_back(nm.A_a.block(k * two_n, k * two_n, two_n, two_n));
        if (nm.attacked_blocks.back() != cm.agent_block(part.D_a(k, k))) nm.attacked_blocks_match = false;
    }
    Matrix off_diagonal = nm.A_a;
    for (Index k = 0; k < na; ++k) off_diagonal.block(k * two_n, k * two_n, two_n, two_n).setZero();
    if (max_abs(off_diagonal) != 0.0) nm.attacked_blocks_match = false;
    return nm;
}

Vector aggregate_attack_input(const AgentDynamics& d, std::span<const LinkAttack> links) {
    Vector out = Vector::Zero(d.p());
    for (const auto& link : links) {
        if (link.xhat.size() != d.n() || link.y.size() != d.p()) {
            throw ValidationError("link attack: signal dimensions must be n for xhat and p for y");
        }
        out += link.y - d.C * link.xhat;
    }
    return out;
}

}  // namespace mascyber
