#include "mascyber/sci.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <thread>

#include "mascyber/errors.hpp"

namespace mascyber {

const char* to_string(SciConvention c) {
    return c == SciConvention::diagonalizing ? "diagonalizing" : "paper_literal";
}

std::optional<SciConvention> parse_sci_convention(const std::string& name) {
    if (name == "diagonalizing") return SciConvention::diagonalizing;
    if (name == "paper_literal" || name == "paper-literal") return SciConvention::paper_literal;
    return std::nullopt;
}

namespace {

// For diagonalizable A, the rows of V^-1 B belonging to eigenvalue c span the
// same space as W^H B, where the columns of W span the left null space of
// cI - A; the rows of V_c^T B do the same with A^T in place of A. W comes
// from the trailing left singular vectors of cI - A, whose rank is known to be
// dim minus the multiplicity of c, so no eigenvector matrix is inverted and no
// rank decision is made on the shifted matrix itself. The cutoff is a
// first-order bound on the angle error of W (perturbation over the singular
// gap, the perturbation including the error in c) times |B|, so round-off in
// the modes l_fa does not reach stays below it.
struct ModeProjections {
    std::vector<CMatrix> projected;  // W^H l_fa per distinct eigenvalue
    std::vector<double> cutoff;      // absolute, shared by every column subset
};

constexpr double kSubspaceMargin = 10.0;  // over the first-order bound

ModeProjections mode_projections(const LaplacianPartition& part, SciConvention convention,
                                 std::optional<double> rtol) {
    if (part.n_attacked() == 0) throw ValidationError("security index: no attacked agents");
    const Eigenbasis basis = diagonalizing_basis(part.L_f);
    const Index nf = part.n_followers();
    const CMatrix A = convention == SciConvention::diagonalizing ? CMatrix(part.L_f.cast<Complex>())
                                                                 : CMatrix(part.L_f.transpose().cast<Complex>());
    const CMatrix l_fa = part.l_fa.cast<Complex>();
    const double b_norm = Eigen::JacobiSVD<CMatrix>(l_fa).singularValues()(0);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    ModeProjections out;
    std::vector<Complex> seen;
    for (Index i = 0; i < basis.values.size(); ++i) {
        const Complex c = basis.values(i);
        if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
        seen.push_back(c);
        const Index mult = (basis.values.array() == c).count();
        const CMatrix M = c * CMatrix::Identity(nf, nf) - A;
        const Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const CMatrix W = svd.matrixU().rightCols(mult);
        out.projected.push_back(W.adjoint() * l_fa);
        if (rtol) {
            out.cutoff.push_back(*rtol * std::max(sv(0), b_norm));
        } else {
            // c is only accurate to its condition number times round-off, and
            // the exact shifted matrix has `mult` zero singular values, so the
            // largest computed one bounds what remains after the shift.
            const auto pair_sv = Eigen::JacobiSVD<CMatrix>(W.adjoint() * svd.matrixV().rightCols(mult)).singularValues();
            const double smallest = pair_sv(pair_sv.size() - 1);
            const double condition = smallest > 0.0 ? 1.0 / smallest : std::numeric_limits<double>::infinity();
            const double perturbation =
                condition * (sv(nf - mult) + static_cast<double>(nf + l_fa.cols()) * eps * sv(0));
            // A single eigenspace fills the space: W is exact up to round-off.
            const double gap = nf > mult ? sv(nf - mult - 1) : 0.0;
            const double angle = nf > mult ? (gap > 0.0 ? std::min(1.0, perturbation / gap) : 1.0)
                                           : static_cast<double>(nf + l_fa.cols()) * eps;
            out.cutoff.push_back(kSubspaceMargin * angle * b_norm);
        }
    }
    return out;
}

Index controllable_modes(const ModeProjections& t, const std::vector<Index>& cols) {
    Index rank = 0;
    for (std::size_t k = 0; k < t.projected.size(); ++k) {
        CMatrix sub(t.projected[k].rows(), static_cast<Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Index>(j)) = t.projected[k].col(cols[j]);
        rank += rank_with_absolute_tolerance(sub, t.cutoff[k]).rank;
    }
    return rank;
}

SciReport compute(const LaplacianPartition& part, SciConvention convention, std::optional<double> rtol,
                  bool with_network) {
    SciReport rep;
    rep.convention = convention;
    rep.n_followers = part.n_followers();
    const Index nf = part.n_followers();
    if (nf == 0) {
        if (part.n_attacked() == 0) throw ValidationError("security index: no attacked agents");
        for (AgentId id : part.attacked_ids) rep.per_agent[id] = 0;
        rep.full_control = true;
        return rep;
    }
    const ModeProjections t = mode_projections(part, convention, rtol);
    rep.tolerance_used = *std::max_element(t.cutoff.begin(), t.cutoff.end());
    std::vector<Index> all;
    for (Index k = 0; k < part.n_attacked(); ++k) {
        all.push_back(k);
        rep.per_agent[part.attacked_ids[static_cast<std::size_t>(k)]] = controllable_modes(t, {k});
    }
    if (with_network) {
        rep.network_sci = controllable_modes(t, all);
        rep.full_control = rep.network_sci == nf;
        for (const auto& [id, v] : rep.per_agent) rep.monotone = rep.monotone && rep.network_sci >= v;
    }
    return rep;
}

void next_combination_or_end(std::vector<int>& idx, int n, bool& done) {
    const int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) {
        done = true;
        return;
    }
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
}

enum class SubsetOutcome { feasible, infeasible, skipped };

SubsetOutcome evaluate(const DirectedGraph& g, const std::vector<AgentId>& attacked, const AttackSetOptions& opts) {
    const LaplacianPartition part = partition(g, attacked, true);
    if (part.n_followers() == 0) return SubsetOutcome::feasible;
    if (!check_eigvec_span(part.L_f).holds) return SubsetOutcome::skipped;
    const SciReport rep = compute(part, opts.convention, opts.rtol, true);
    return rep.full_control ? SubsetOutcome::feasible : SubsetOutcome::infeasible;
}

}  // namespace

SciReport sci_per_agent(const LaplacianPartition& part, SciConvention convention, std::optional<double> rtol) {
    return compute(part, convention, rtol, false);
}

SciReport sci_network(const LaplacianPartition& part, SciConvention convention, std::optional<double> rtol) {
    return compute(part, convention, rtol, true);
}

AttackSetSolution min_attack_set(const DirectedGraph& g, const AttackSetOptions& opts) {
    const int n = g.n_agents();
    if (n > kMaxAttackSetAgents) {
        throw ValidationError("attack set search: exhaustive search is limited to " +
                              std::to_string(kMaxAttackSetAgents) + " agents");
    }
    AttackSetSolution sol;
    const int max_card = opts.max_cardinality <= 0 ? n : static_cast<int>(std::min<Index>(opts.max_cardinality, n));
    unsigned workers = opts.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.workers;

    for (int card = 1; card <= max_card; ++card) {
        std::vector<std::vector<AgentId>> subsets;
        std::vector<int> idx(static_cast<std::size_t>(card));
        for (int i = 0; i < card; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (bool done = false; !done; next_combination_or_end(idx, n, done)) {
            std::vector<AgentId> s;
            for (int i : idx) s.push_back(i + 1);
            subsets.push_back(std::move(s));
        }

        std::vector<SubsetOutcome> outcomes(subsets.size());
        const std::size_t chunk = (subsets.size() + workers - 1) / workers;
        std::vector<std::future<void>> jobs;
        for (std::size_t begin = 0; begin < subsets.size(); begin += chunk) {
            const std::size_t end = std::min(subsets.size(), begin + chunk);
            jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, [&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) outcomes[i] = evaluate(g, subsets[i], opts);
            }));
        }
        for (auto& j : jobs) j.get();

        sol.evaluated_subsets += static_cast<Index>(subsets.size());
        for (std::size_t i = 0; i < subsets.size(); ++i) {
            if (outcomes[i] == SubsetOutcome::feasible) sol.witness_sets.push_back(subsets[i]);
            if (outcomes[i] == SubsetOutcome::skipped) sol.skipped_subsets.push_back(subsets[i]);
        }
        if (!sol.witness_sets.empty()) {
            sol.minimal_cardinality = card;
            return sol;
        }
    }
    sol.diagnostic = "no attacked set of cardinality <= " + std::to_string(max_card) +
                     " gives the adversary control of every follower";
    return sol;
}

}  // namespace mascyber
