#pragma once

// Directed communication graph, its Laplacian, and the follower/attacked
// split of that Laplacian.

#include <optional>
#include <span>
#include <vector>

#include "mascyber/numerics.hpp"

namespace mascyber {

// Agents are numbered 1..N throughout the public interface.
using AgentId = int;

// from -> to: agent `from` transmits to agent `to`.
struct Edge {
    AgentId from = 0;
    AgentId to = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class DirectedGraph {
public:
    DirectedGraph() = default;
    // Rejects self-loops, out-of-range endpoints, and duplicate edges.
    DirectedGraph(int n_agents, std::vector<Edge> edges);

    int n_agents() const { return n_agents_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Agents j with an edge j -> i, ascending.
    std::vector<AgentId> in_neighbors(AgentId i) const;
    int in_degree(AgentId i) const;

private:
    int n_agents_ = 0;
    std::vector<Edge> edges_;  // sorted
};

// L = D - adjacency, with a_ij = 1 iff edge j -> i.
Matrix laplacian(const DirectedGraph& g);

struct LaplacianPartition {
    Matrix L;    // original ordering
    Matrix L_f;  // grounded Laplacian over followers
    Matrix l_fa; // N_f x N_a
    Matrix l_af; // N_a x N_f
    Matrix L_a;  // N_a x N_a
    Matrix D_a;  // diag of attacked in-degrees
    std::vector<AgentId> follower_ids;  // ascending
    std::vector<AgentId> attacked_ids;  // ascending

    Index n_followers() const { return static_cast<Index>(follower_ids.size()); }
    Index n_attacked() const { return static_cast<Index>(attacked_ids.size()); }
    // Original agent ids in followers-first order.
    std::vector<AgentId> permutation() const;
    // [[L_f, l_fa], [l_af, L_a]] in followers-first order.
    Matrix reassembled() const;
};

// Followers come first. Unless allow_degenerate is set the attacked set must
// be a nonempty proper subset of the agents.
LaplacianPartition partition(const DirectedGraph& g, std::span<const AgentId> attacked,
                             bool allow_degenerate = false);

struct EigenCluster {
    Complex value;   // centroid
    int algebraic = 0;
    int geometric = 0;
    double tolerance_used = 0.0;  // singular value cutoff for the kernel dimension
};

struct EigvecSpanReport {
    bool holds = true;
    std::vector<Complex> eigenvalues;   // as returned by the eigensolver
    std::vector<EigenCluster> clusters;
    // Conditioning of the assembled eigenbasis: sigma_min / sigma_max. A split
    // Jordan block shows up here as a near-zero ratio even when the clusters
    // themselves look non-defective.
    double basis_conditioning = 1.0;
};

// Eigenvalues closer than this are treated as one eigenvalue.
double cluster_tolerance(Complex lambda);

// Smallest accepted eigenbasis conditioning before the span assumption is
// declared violated.
inline constexpr double kMinBasisConditioning = 1e-6;

// Does the eigenvector set of L_f span the whole space? 0x0 holds vacuously.
EigvecSpanReport check_eigvec_span(const Matrix& L_f);

// Eigenbasis of a diagonalizable L_f: column k of `vectors` is a unit right
// eigenvector for values[k]. Repeated eigenvalues get an orthonormal basis of
// their eigenspace. Throws AssumptionError when the span assumption fails.
struct Eigenbasis {
    CVector values;
    CMatrix vectors;
};
Eigenbasis diagonalizing_basis(const Matrix& L_f);

}  // namespace mascyber
