#pragma once

// Controllability verdicts for the attacked network.
//
// full_network_check tests whether the adversary, injecting only into the
// attacked agents, can steer the whole stacked state (attacked + followers).
// The sufficient rank conditions are always reported together with the
// direct Kalman rank of the full pair (A*, B*), which is the ground truth.
//
// follower_check tests whether the followers can be steered through the
// attacked agents' states, via per-agent, graph, and per-mode conditions.

#include <optional>
#include <string>
#include <vector>

#include "mascyber/model.hpp"
#include "mascyber/numerics.hpp"
#include "mascyber/topology.hpp"

namespace mascyber {

enum class PairMethod { kalman, pbh };

struct PairTestResult {
    Index rank = 0;
    Index required = 0;
    bool controllable = false;
    PairMethod method = PairMethod::kalman;
    double tolerance_used = 0.0;
};

PairTestResult kalman_controllable(const Matrix& A, const Matrix& B, std::optional<double> rtol = std::nullopt);

// rank [lambda I - A, B] at every eigenvalue lambda of A; `rank` is the
// minimum over eigenvalues and tolerance_used the cutoff at that eigenvalue.
PairTestResult pbh_controllable(const Matrix& A, const Matrix& B, std::optional<double> rtol = std::nullopt);
PairTestResult pbh_controllable(const CMatrix& A, const CMatrix& B, std::optional<double> rtol = std::nullopt);

struct AttackedAgentPair {
    AgentId agent = 0;
    double in_degree = 0.0;
    PairTestResult result;
};

struct FullNetworkOptions {
    std::optional<double> rtol;
    // Refuse state dimensions above this unless allow_large is set.
    Index max_state_dim = 400;
    bool allow_large = false;
};

struct FullNetworkReport {
    std::vector<AttackedAgentPair> attacked_pairs;
    std::optional<PairTestResult> follower_pair;  // (A_f, A_fa)
    bool mk_columns_nonzero = false;
    Index mk_first_zero_column_power = 0;  // first k with a zero column in M_k (0 if none)
    RankResult s_rank;
    Index s_required = 0;
    Index w1_rows = 0;
    Index w1_cols = 0;
    bool theorem_verdict = false;

    // Ground truth: Kalman matrix of (A*, B*) over 2nN powers.
    RankResult direct_rank;
    Index direct_required = 0;
    bool direct_verdict = false;
    // Same Kalman matrix with every column renormalized after each power.
    RankResult scaled_rank;
    double column_norm_log10_span = 0.0;  // log10(max/min) raw column norm

    // Diagnostics from the proof machinery.
    Index attacked_kalman_rank = 0;          // rank of the (A_a, B_a) Kalman matrix
    Index kernel_image_intersection_dim = 0; // dim(ker M* intersect Im Q*)
    double factorization_rel_error = 0.0;    // ||M - M* Q*|| / ||M||
    std::string agreement_note;
    bool short_circuited = false;            // degenerate partition, only direct check run
};

FullNetworkReport full_network_check(const NetworkMatrices& nm, const CheckMatrices& cm,
                                     const LaplacianPartition& part, const FullNetworkOptions& opts = {});

struct ModeResult {
    Complex eigenvalue;
    int multiplicity = 0;
    PairTestResult result;  // (A + BK + lambda HC, HC), over the complex field
};

struct FollowerReport {
    EigvecSpanReport span;
    std::vector<AttackedAgentPair> attacked_pairs;
    PairTestResult graph_pair;  // (L_f, l_fa)
    std::vector<ModeResult> modes;
    bool verdict = false;
};

FollowerReport follower_check(const NetworkMatrices& nm, const LaplacianPartition& part, const CheckMatrices& cm,
                              std::optional<double> rtol = std::nullopt);

const char* to_string(PairMethod m);

}  // namespace mascyber
