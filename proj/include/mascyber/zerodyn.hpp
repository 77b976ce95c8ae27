#pragma once

// Zero-dynamics analysis of the attacked and follower subsystems.
//
// Both subsystems are written as Rosenbrock pencils
//   P(s) = [[s I - A, -B], [C, 0]]
// and their invariant zeros are the finite s where P(s) drops below its
// normal rank.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mascyber/model.hpp"
#include "mascyber/numerics.hpp"
#include "mascyber/topology.hpp"

namespace mascyber {

enum class PencilKind { attacked, followers };
const char* to_string(PencilKind k);

struct RosenbrockPencil {
    PencilKind kind = PencilKind::attacked;
    Matrix A;
    Matrix B;
    Matrix C;
    Index normal_rank = 0;

    Index state_dim() const { return A.rows(); }
    Index input_dim() const { return B.cols(); }
    CMatrix at(Complex s) const;
};

struct ZeroOptions {
    std::uint64_t seed = 0;
    // Relative rank cutoff used to confirm a zero and to extract its kernel;
    // computed zeros are only accurate to a few ulps times the conditioning,
    // so the machine-epsilon default would reject true zeros.
    double confirm_rtol = 1e-8;
};

// Attacked pencil: A_a, I (x) H_a, I (x) C.
RosenbrockPencil attacked_pencil(const NetworkMatrices& nm, const CheckMatrices& cm, const ZeroOptions& opts = {});
// Follower pencil: A_f, l_fa (x) HC, I (x) C.
RosenbrockPencil follower_pencil(const NetworkMatrices& nm, const CheckMatrices& cm, const LaplacianPartition& part,
                                 const ZeroOptions& opts = {});
RosenbrockPencil make_pencil(PencilKind kind, Matrix A, Matrix B, Matrix C, const ZeroOptions& opts = {});

struct InvariantZero {
    Complex value;
    Index rank = 0;  // rank of P(value)
};

struct ZeroSet {
    std::vector<InvariantZero> zeros;
    // B is zero: the input cannot influence anything, so reported rank drops
    // come from unobservable modes only.
    bool no_input_influence = false;
    Index candidates_first = 0;   // finite eigenvalues of the first compression
    Index candidates_second = 0;  // and of the second
};

ZeroSet invariant_zeros(const RosenbrockPencil& p, const ZeroOptions& opts = {});

struct ZeroDirection {
    Complex zero;
    CVector state_part;  // x_a0 or x_f0
    CVector input_part;  // a_0 or x_af
    double residual = 0.0;  // ||P(zero) [state; input]|| / ||P(zero)||
};

// Kernel basis of P(zero) split into state and input parts. Throws
// NumericalError when the kernel is empty (zero not confirmed under the
// same tolerance).
std::vector<ZeroDirection> zero_directions(const RosenbrockPencil& p, Complex zero, const ZeroOptions& opts = {});

struct Excitation {
    bool feasible = false;
    std::string reason;
};

// The direction can be excited only if the attack actually enters the
// dynamics: B * input_part must be nonzero.
Excitation excitation_feasible(const ZeroDirection& d, const RosenbrockPencil& p);

struct ZeroAuditReport {
    bool vacuous = false;       // C has trivial kernel, nothing to excite
    std::string note;
    Index attacked_zeros = 0;
    Index follower_zeros = 0;
    Index attacked_directions_checked = 0;
    Index follower_directions_checked = 0;
    Index annihilation_samples = 0;
    Index violations = 0;       // any counterexample found
    std::vector<std::string> findings;
};

struct AuditInputs {
    const AgentDynamics& dynamics;
    const CheckMatrices& check;
    const LaplacianPartition& partition;
    const NetworkMatrices& network;
};

// Searches for a simultaneous excitation of attacked and follower zero
// dynamics. Any hit is reported as a violation.
ZeroAuditReport zero_dynamics_audit(const AuditInputs& in, const ZeroOptions& opts = {},
                                    Index annihilation_samples = 8);

}  // namespace mascyber
