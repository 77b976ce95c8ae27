#pragma once

// Security controllability indices.
//
// With L_f diagonalized by a transform P, the index of attacked agent i is
// the rank of the controllability matrix of (diag(lambda), column i of
// P l_fa); the network index uses all columns at once. It counts how many
// follower modes the adversary can steer.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mascyber/topology.hpp"

namespace mascyber {

// How the transform P is built from the right eigenvectors V of L_f.
//   diagonalizing: P = V^-1, so P L_f P^-1 is exactly diagonal.
//   paper_literal: P = V^T, i.e. the right eigenvectors laid out as rows.
enum class SciConvention { diagonalizing, paper_literal };

const char* to_string(SciConvention c);
// Accepts "diagonalizing", "paper_literal" and "paper-literal".
std::optional<SciConvention> parse_sci_convention(const std::string& name);

struct SciReport {
    SciConvention convention = SciConvention::diagonalizing;
    std::map<AgentId, Index> per_agent;
    Index network_sci = 0;
    Index n_followers = 0;
    bool full_control = false;
    double tolerance_used = 0.0;  // largest per-eigenvalue rank cutoff
    bool monotone = true;         // network_sci >= every per-agent index
};

// Per-agent indices only (network_sci left at 0). Throws AssumptionError when
// L_f is not diagonalizable, ValidationError when no agent is attacked.
SciReport sci_per_agent(const LaplacianPartition& part, SciConvention convention,
                        std::optional<double> rtol = std::nullopt);

// Per-agent and network indices.
SciReport sci_network(const LaplacianPartition& part, SciConvention convention,
                      std::optional<double> rtol = std::nullopt);

struct AttackSetSolution {
    Index minimal_cardinality = 0;           // 0 when no witness was found
    std::vector<std::vector<AgentId>> witness_sets;  // lexicographic
    Index evaluated_subsets = 0;
    // Subsets whose grounded Laplacian violated the span assumption.
    std::vector<std::vector<AgentId>> skipped_subsets;
    std::string diagnostic;
};

struct AttackSetOptions {
    Index max_cardinality = 0;  // 0 means N
    SciConvention convention = SciConvention::diagonalizing;
    std::optional<double> rtol;
    unsigned workers = 0;       // 0 means hardware concurrency
};

inline constexpr int kMaxAttackSetAgents = 20;

// Smallest attacked sets whose network index equals the follower count,
// searched exhaustively by increasing cardinality.
AttackSetSolution min_attack_set(const DirectedGraph& g, const AttackSetOptions& opts = {});

}  // namespace mascyber
