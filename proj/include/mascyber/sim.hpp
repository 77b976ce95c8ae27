#pragma once

// Fixed-step RK4 simulation of the observer-based consensus network with
// man-in-the-middle attacks on the incoming links of selected agents.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mascyber/model.hpp"
#include "mascyber/topology.hpp"

namespace mascyber {

enum class SignalKind { zero, constant, sinusoid, step };

struct SignalGenerator {
    SignalKind kind = SignalKind::zero;
    Vector value;             // constant / step value, sinusoid amplitude
    double frequency = 0.0;   // rad/s
    double phase = 0.0;       // rad
    double at = 0.0;          // step switch time, absolute seconds

    // zero-kind generators return a zero vector of length dim.
    Vector evaluate(double t, Index dim) const;
    Index dimension() const { return kind == SignalKind::zero ? -1 : value.size(); }
};

struct LinkSignal {
    AgentId from = 0;
    SignalGenerator xhat;
    SignalGenerator y;
};

// Every incoming link of `target` carries forged data from start_time on.
// `xhat` and `y` apply to each link unless a per-link entry overrides them.
struct AttackSignalSpec {
    AgentId target = 0;
    double start_time = 0.0;
    SignalGenerator xhat;
    SignalGenerator y;
    std::vector<LinkSignal> links;

    const LinkSignal* link_from(AgentId j) const;
};

struct SimulationSetup {
    AgentDynamics dynamics;
    DirectedGraph graph;
    std::vector<AttackSignalSpec> attacks;
    double t_end = 0.0;
    double dt = 0.0;
    Vector x0;  // [x_1; xhat_1; x_2; xhat_2; ...] in agent order
    double divergence_limit = 1e9;
};

struct Trajectory {
    Index n = 0;
    int n_agents = 0;
    std::vector<double> times;
    std::vector<Vector> states;          // 2 n N per time, agent order
    std::vector<double> consensus_error; // max pairwise plant-state distance
};

// Throws ValidationError on inconsistent setups.
void validate_setup(const SimulationSetup& s);

Trajectory simulate(const SimulationSetup& s);

// Runs the per-link model and the stacked model x' = A x + B a(t) side by
// side and returns the largest state difference.
double aggregate_equivalence_check(const SimulationSetup& s);

// Stacked model in agent order with the agents in `active` attacked: their
// Laplacian rows keep only the in-degree, and B routes a_i through H_a.
// B has one p-wide column block per agent.
struct StackedSystem {
    Matrix A;
    Matrix B;
};
StackedSystem stacked_system(const CheckMatrices& cm, const DirectedGraph& g, const std::vector<bool>& active);

// a_i(t) for agent `target` under `spec`.
Vector aggregate_attack_at(const AgentDynamics& d, const DirectedGraph& g, const AttackSignalSpec& spec, double t);

double consensus_error(const Vector& stacked, Index n, int n_agents);

Vector random_initial_state(Index dim, std::uint64_t seed);

// Columns t,agent,x1..xn,xhat1..xhatn; one row per (time, agent).
void export_trajectory(const Trajectory& t, std::ostream& out);
void export_trajectory(const Trajectory& t, const std::filesystem::path& path);
Trajectory read_trajectory(std::istream& in);

}  // namespace mascyber
