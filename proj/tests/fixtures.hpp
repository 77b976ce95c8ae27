#pragma once

#include <fstream>
#include <random>
#include <string>

#include "json.hpp"
#include "mascyber/model.hpp"
#include "mascyber/topology.hpp"

namespace fixtures {

using namespace mascyber;

inline AgentDynamics six_agent_dynamics() {
    AgentDynamics d;
    d.A = (Matrix(2, 2) << -2, 2, -1, 1).finished();
    d.B = (Matrix(2, 1) << 1, 0).finished();
    d.C = Matrix::Identity(2, 2);
    d.H = (Matrix(2, 2) << 0, 0.3, -0.3, 0).finished();
    d.K = (Matrix(1, 2) << -1, 2).finished();
    return d;
}

inline DirectedGraph six_agent_graph() {
    return DirectedGraph(6, {{6, 1}, {5, 2}, {6, 2}, {2, 3}, {2, 4}, {3, 4}, {2, 5}, {5, 6}});
}

inline const std::vector<AgentId>& six_agent_attacked() {
    static const std::vector<AgentId> ids{4, 5, 6};
    return ids;
}

inline std::string source_path(const std::string& rel) { return std::string(MASCYBER_SOURCE_DIR) + "/" + rel; }

inline nlohmann::json load_json(const std::string& rel) {
    std::ifstream in(source_path(rel));
    return nlohmann::json::parse(in);
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

// Random directed graph on n agents; each ordered pair is an edge with
// probability `density`.
inline DirectedGraph random_graph(int n, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<Edge> edges;
    for (AgentId i = 1; i <= n; ++i)
        for (AgentId j = 1; j <= n; ++j)
            if (i != j && coin(rng)) edges.push_back({i, j});
    return DirectedGraph(n, edges);
}

struct RandomCase {
    AgentDynamics dynamics;
    DirectedGraph graph;
    std::vector<AgentId> attacked;
};

// n <= 3, p < n, N <= 4, nonempty proper attacked set.
inline RandomCase random_output_deficient_case(std::mt19937_64& rng) {
    RandomCase c;
    const Index n = 2 + static_cast<Index>(rng() % 2);
    const Index p = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 1));
    const Index m = 1 + static_cast<Index>(rng() % 2);
    c.dynamics.A = random_matrix(n, n, rng);
    c.dynamics.B = random_matrix(n, m, rng);
    c.dynamics.C = random_matrix(p, n, rng);
    c.dynamics.H = random_matrix(n, p, rng);
    c.dynamics.K = random_matrix(m, n, rng);
    const int N = 2 + static_cast<int>(rng() % 3);
    c.graph = random_graph(N, 0.5, rng);
    while (c.attacked.empty() || static_cast<int>(c.attacked.size()) == N) {
        c.attacked.clear();
        for (AgentId i = 1; i <= N; ++i)
            if (rng() % 2) c.attacked.push_back(i);
    }
    return c;
}

// B and H along the one direction C observes, everything else random, then a
// random change of coordinates. Holding y and the observer output at zero
// leaves the dynamics of A restricted to ker C free, so every attacked agent
// has invariant zeros at the eigenvalues of that block (A22 below).
struct PlantedZeroCase {
    RandomCase c;
    Matrix A22;
};

inline PlantedZeroCase random_planted_zero_case(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    const Index n = 2 + static_cast<Index>(rng() % 2);
    PlantedZeroCase out;
    const Matrix A = random_matrix(n, n, rng);
    Matrix B = Matrix::Zero(n, 1), H = Matrix::Zero(n, 1), C = Matrix::Zero(1, n);
    B(0, 0) = (rng() % 2 ? 1.0 : -1.0) * u(rng);
    H(0, 0) = (rng() % 2 ? 1.0 : -1.0) * u(rng);
    C(0, 0) = 1.0;
    const Matrix K = random_matrix(1, n, rng);
    out.A22 = A.bottomRightCorner(n - 1, n - 1);
    Matrix T = random_matrix(n, n, rng) + 2.0 * Matrix::Identity(n, n);
    const Matrix Ti = T.inverse();
    out.c.dynamics.A = T * A * Ti;
    out.c.dynamics.B = T * B;
    out.c.dynamics.H = T * H;
    out.c.dynamics.C = C * Ti;
    out.c.dynamics.K = K * Ti;
    const int N = 2 + static_cast<int>(rng() % 3);
    out.c.graph = random_graph(N, 0.5, rng);
    while (out.c.attacked.empty() || static_cast<int>(out.c.attacked.size()) == N) {
        out.c.attacked.clear();
        for (AgentId i = 1; i <= N; ++i)
            if (rng() % 2) out.c.attacked.push_back(i);
    }
    return out;
}

}  // namespace fixtures
