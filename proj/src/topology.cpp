#include "mascyber/topology.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mascyber/errors.hpp"

namespace mascyber {

DirectedGraph::DirectedGraph(int n_agents, std::vector<Edge> edges) : n_agents_(n_agents), edges_(std::move(edges)) {
    if (n_agents_ < 0) throw ValidationError("graph: n_agents must be nonnegative");
    for (const auto& e : edges_) {
        if (e.from < 1 || e.from > n_agents_ || e.to < 1 || e.to > n_agents_) {
            throw ValidationError("graph: edge [" + std::to_string(e.from) + "," + std::to_string(e.to) +
                                  "] references an unknown agent");
        }
        if (e.from == e.to) {
            throw ValidationError("graph: self-loop on agent " + std::to_string(e.from));
        }
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw ValidationError("graph: duplicate edge");
    }
}

std::vector<AgentId> DirectedGraph::in_neighbors(AgentId i) const {
    std::vector<AgentId> out;
    for (const auto& e : edges_) {
        if (e.to == i) out.push_back(e.from);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int DirectedGraph::in_degree(AgentId i) const {
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [i](const Edge& e) { return e.to == i; }));
}

Matrix laplacian(const DirectedGraph& g) {
    const Index n = g.n_agents();
    Matrix L = Matrix::Zero(n, n);
    for (const auto& e : g.edges()) {
        L(e.to - 1, e.from - 1) -= 1.0;
        L(e.to - 1, e.to - 1) += 1.0;
    }
    return L;
}

std::vector<AgentId> LaplacianPartition::permutation() const {
    std::vector<AgentId> out = follower_ids;
    out.insert(out.end(), attacked_ids.begin(), attacked_ids.end());
    return out;
}

Matrix LaplacianPartition::reassembled() const {
    const Index nf = n_followers();
    const Index na = n_attacked();
    Matrix out(nf + na, nf + na);
    out.topLeftCorner(nf, nf) = L_f;
    out.topRightCorner(nf, na) = l_fa;
    out.bottomLeftCorner(na, nf) = l_af;
    out.bottomRightCorner(na, na) = L_a;
    return out;
}

LaplacianPartition partition(const DirectedGraph& g, std::span<const AgentId> attacked, bool allow_degenerate) {
    const int n = g.n_agents();
    std::vector<bool> is_attacked(static_cast<std::size_t>(n) + 1, false);
    for (AgentId id : attacked) {
        if (id < 1 || id > n) throw ValidationError("attacked: unknown agent id " + std::to_string(id));
        if (is_attacked[static_cast<std::size_t>(id)]) {
            throw ValidationError("attacked: agent " + std::to_string(id) + " listed twice");
        }
        is_attacked[static_cast<std::size_t>(id)] = true;
    }

    LaplacianPartition part;
    for (AgentId id = 1; id <= n; ++id) {
        (is_attacked[static_cast<std::size_t>(id)] ? part.attacked_ids : part.follower_ids).push_back(id);
    }
    if (!allow_degenerate && (part.attacked_ids.empty() || part.follower_ids.empty())) {
        throw ValidationError("attacked: must be a nonempty proper subset of the agents");
    }

    part.L = laplacian(g);
    const auto pick = [&](const std::vector<AgentId>& rows, const std::vector<AgentId>& cols) {
        Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                out(static_cast<Index>(r), static_cast<Index>(c)) = part.L(rows[r] - 1, cols[c] - 1);
            }
        }
        return out;
    };
    part.L_f = pick(part.follower_ids, part.follower_ids);
    part.l_fa = pick(part.follower_ids, part.attacked_ids);
    part.l_af = pick(part.attacked_ids, part.follower_ids);
    part.L_a = pick(part.attacked_ids, part.attacked_ids);
    part.D_a = Matrix::Zero(part.n_attacked(), part.n_attacked());
    for (Index k = 0; k < part.n_attacked(); ++k) {
        part.D_a(k, k) = g.in_degree(part.attacked_ids[static_cast<std::size_t>(k)]);
    }
    return part;
}

double cluster_tolerance(Complex lambda) { return 1e-6 * (1.0 + std::abs(lambda)); }

namespace {

// Single-linkage clustering of eigenvalues; clusters keep solver order of
// their first member.
std::vector<std::vector<Complex>> cluster(const std::vector<Complex>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double tol = std::min(cluster_tolerance(values[i]), cluster_tolerance(values[j]));
            if (std::abs(values[i] - values[j]) <= tol) parent[find(j)] = find(i);
        }
    }
    std::vector<std::vector<Complex>> groups;
    std::vector<std::size_t> group_of(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (group_of[root] == n) {
            group_of[root] = groups.size();
            groups.emplace_back();
        }
        groups[group_of[root]].push_back(values[i]);
    }
    return groups;
}

struct ClusterBases {
    EigvecSpanReport report;
    std::vector<CMatrix> bases;
};

ClusterBases analyze(const Matrix& L_f) {
    ClusterBases out;
    if (L_f.rows() != L_f.cols()) throw ValidationError("grounded Laplacian must be square");
    const Index n = L_f.rows();
    if (n == 0) return out;

    out.report.eigenvalues = eigenvalues(L_f);
    const CMatrix Lc = L_f.cast<Complex>();
    Index total_geometric = 0;
    for (const auto& group : cluster(out.report.eigenvalues)) {
        Complex centroid{0.0, 0.0};
        for (const auto& v : group) centroid += v;
        centroid /= static_cast<double>(group.size());
        // Snap numerically real clusters onto the real axis.
        if (std::abs(centroid.imag()) <= cluster_tolerance(centroid)) centroid.imag(0.0);

        EigenCluster c;
        c.value = centroid;
        c.algebraic = static_cast<int>(group.size());
        const double default_tol =
            default_rank_tolerance(n, n, rank_with_tolerance(Lc).singular_values.front());
        c.tolerance_used = std::max(default_tol, cluster_tolerance(centroid));
        const CMatrix shifted = Lc - centroid * CMatrix::Identity(n, n);
        CMatrix basis = kernel_basis_absolute(shifted, c.tolerance_used);
        c.geometric = static_cast<int>(basis.cols());
        total_geometric += basis.cols();
        if (c.geometric != c.algebraic) out.report.holds = false;
        out.report.clusters.push_back(c);
        out.bases.push_back(std::move(basis));
    }

    if (total_geometric == n) {
        CMatrix V(n, n);
        Index col = 0;
        for (const auto& b : out.bases) {
            for (Index k = 0; k < b.cols(); ++k) V.col(col++) = normalize_phase(b.col(k));
        }
        const auto s = rank_with_tolerance(V).singular_values;
        out.report.basis_conditioning = s.back() / s.front();
        if (out.report.basis_conditioning < kMinBasisConditioning) out.report.holds = false;
    } else {
        out.report.basis_conditioning = 0.0;
    }
    return out;
}

}  // namespace

EigvecSpanReport check_eigvec_span(const Matrix& L_f) { return analyze(L_f).report; }

Eigenbasis diagonalizing_basis(const Matrix& L_f) {
    ClusterBases cb = analyze(L_f);
    if (!cb.report.holds) {
        throw AssumptionError("grounded Laplacian is not diagonalizable: its eigenvectors do not span the space");
    }
    const Index n = L_f.rows();
    Eigenbasis out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    Index col = 0;
    for (std::size_t k = 0; k < cb.bases.size(); ++k) {
        for (Index j = 0; j < cb.bases[k].cols(); ++j) {
            out.values(col) = cb.report.clusters[k].value;
            out.vectors.col(col) = normalize_phase(cb.bases[k].col(j));
            ++col;
        }
    }
    return out;
}

}  // namespace mascyber
