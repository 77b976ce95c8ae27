#pragma once

// Agent dynamics and the stacked network matrices of the attacked closed loop.
//
// Each agent carries a plant state x and an observer state xhat; the stacked
// per-agent state is [x; xhat] (2n entries). In the network matrices the
// attacked agents come first, then the followers.

#include <optional>
#include <span>
#include <vector>

#include "mascyber/numerics.hpp"
#include "mascyber/topology.hpp"

namespace mascyber {

struct AgentDynamics {
    Matrix A;  // n x n
    Matrix B;  // n x m
    Matrix C;  // p x n
    Matrix H;  // n x p observer gain
    Matrix K;  // m x n controller gain

    Index n() const { return A.rows(); }
    Index m() const { return B.cols(); }
    Index p() const { return C.rows(); }
};

// Throws ValidationError naming the first inconsistent matrix.
void check_dimensions(const AgentDynamics& d);

struct DynamicsValidation {
    RankResult controllability;  // rank of [B, AB, ..., A^(n-1) B]
    RankResult observability;    // rank of [C; CA; ...; C A^(n-1)]
    RankResult observer_gain;    // rank of H
    bool controllable = false;
    bool observable = false;
    bool gain_full_column_rank = false;

    bool passes() const { return controllable && observable && gain_full_column_rank; }
};

DynamicsValidation validate_dynamics(const AgentDynamics& d, std::optional<double> rtol = std::nullopt);

// Kalman matrix [B, AB, ..., A^(powers-1) B].
Matrix kalman_matrix(const Matrix& A, const Matrix& B, Index powers);
CMatrix kalman_matrix(const CMatrix& A, const CMatrix& B, Index powers);

// Per-agent building blocks over the stacked state [x; xhat].
struct CheckMatrices {
    Matrix A;    // diag(A, A)
    Matrix B;    // [[0, B], [0, B]]
    Matrix H;    // [[0, 0], [-H, H]]
    Matrix H_a;  // [[0], [H]]
    Matrix K;    // diag(K, K)
    Matrix C;    // diag(C, C)

    // A + B K: the isolated closed loop of one agent.
    Matrix closed_loop() const { return A + B * K; }
    // H C: the neighbour coupling term.
    Matrix coupling() const { return H * C; }
    // A + B K + d H C for an agent whose coupling weight is d.
    Matrix agent_block(double d) const { return closed_loop() + d * coupling(); }
    CMatrix agent_block(Complex lambda) const;
};

CheckMatrices build_check_matrices(const AgentDynamics& d);

struct NetworkMatrices {
    Index n = 0;    // plant dimension
    Index p = 0;    // output dimension
    Index n_followers = 0;
    Index n_attacked = 0;

    Matrix A_a;     // I (x) (A+BK) + D_a (x) HC
    Matrix B_a;     // I (x) H_a
    Matrix A_f;     // I (x) (A+BK) + L_f (x) HC
    Matrix A_fa;    // l_fa (x) HC
    Matrix A_star;  // [[A_a, 0], [A_fa, A_f]]
    Matrix B_star;  // [[B_a], [0]]

    // A_a split into its per-agent diagonal blocks; attacked_blocks_match is
    // true when each equals A + BK + d_i HC exactly and A_a has no coupling
    // between attacked agents.
    std::vector<Matrix> attacked_blocks;
    bool attacked_blocks_match = false;
    bool degenerate = false;  // no attacked or no follower agents

    Index state_dim() const { return A_star.rows(); }
};

NetworkMatrices build_network_matrices(const CheckMatrices& cm, const LaplacianPartition& part);

// One forged message on link j -> i: the observer state and output the
// victim receives in place of the neighbour's real ones.
struct LinkAttack {
    Vector xhat;  // n
    Vector y;     // p
};

// a_i = sum over incoming links of (y - C xhat).
Vector aggregate_attack_input(const AgentDynamics& d, std::span<const LinkAttack> links);

}  // namespace mascyber
