#pragma once

// Scenario files: one JSON document describing dynamics, graph, attacked
// set, tolerances and (optionally) a simulation run.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mascyber/model.hpp"
#include "mascyber/sci.hpp"
#include "mascyber/sim.hpp"
#include "mascyber/topology.hpp"

namespace mascyber {

struct Tolerances {
    std::optional<double> rank_rtol;
    std::optional<double> consensus_eps;
};

struct SimSettings {
    double t_end = 0.0;
    double dt = 0.0;
    std::optional<Vector> x0;
    std::vector<AttackSignalSpec> attacks;
};

struct Scenario {
    AgentDynamics dynamics;
    DirectedGraph graph;
    std::vector<AgentId> attacked;  // ascending
    Tolerances tolerances;
    std::optional<SciConvention> sci_convention;
    std::optional<std::uint64_t> seed;
    std::optional<SimSettings> sim;
    std::string digest;  // SHA-256 of the canonical JSON form
};

// Strict parse: unknown fields, wrong shapes and unknown agents are
// rejected with a ValidationError whose message starts with the field path.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

// Simulation setup from the scenario's sim section. A missing x0 is drawn
// uniformly from [-1, 1] with `seed`.
SimulationSetup simulation_setup(const Scenario& s, std::uint64_t seed);

}  // namespace mascyber
