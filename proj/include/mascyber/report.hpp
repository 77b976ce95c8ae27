#pragma once

// Report assembly and serialization. Every command of the CLI produces one
// of the structures below, as JSON or as a plain-text table.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mascyber/analysis.hpp"
#include "mascyber/scenario.hpp"
#include "mascyber/sci.hpp"
#include "mascyber/sim.hpp"
#include "mascyber/zerodyn.hpp"

namespace mascyber {

inline constexpr const char* kToolVersion = "0.1.0";

struct EigenvalueRecord {
    Complex value;
    double residual = 0.0;  // ||L_f v - lambda v|| for the unit eigenvector v
};

struct TopologySummary {
    int n_agents = 0;
    std::vector<AgentId> follower_ids;
    std::vector<AgentId> attacked_ids;
    Matrix L;
    Matrix L_f;
    Matrix l_fa;
    std::vector<double> attacked_in_degrees;
    std::vector<EigenvalueRecord> eigenvalues;  // of L_f
    EigvecSpanReport span;
};

struct ZeroRecord {
    InvariantZero zero;
    std::vector<ZeroDirection> directions;
    std::vector<Excitation> excitation;  // one per direction
};

struct PencilSummary {
    PencilKind kind = PencilKind::attacked;
    Index state_dim = 0;
    Index input_dim = 0;
    Index output_dim = 0;
    Index normal_rank = 0;
    bool no_input_influence = false;
    Index candidates_first = 0;
    Index candidates_second = 0;
    std::vector<ZeroRecord> zeros;
};

struct ZerosSummary {
    std::uint64_t seed = 0;
    double confirm_rtol = 0.0;
    std::optional<PencilSummary> attacked;
    std::optional<PencilSummary> followers;
    ZeroAuditReport audit;
};

struct ToleranceRecord {
    std::optional<double> rank_rtol;  // empty: dimension-scaled machine epsilon
    std::string rank_policy;
    double eigenvalue_cluster_rtol = 1e-6;
    double min_basis_conditioning = 0.0;
    double zero_confirm_rtol = 0.0;
};

struct AnalysisReport {
    std::string tool_version;
    std::string scenario_digest;
    std::uint64_t seed = 0;
    ToleranceRecord tolerances;
    DynamicsValidation dynamics;
    TopologySummary topology;
    std::optional<FullNetworkReport> full_network;
    std::optional<FollowerReport> followers;
    std::vector<SciReport> sci;
    ZerosSummary zeros;
    std::vector<std::string> notes;
};

struct SimulationSummary {
    std::string scenario_digest;
    double t_end = 0.0;
    double dt = 0.0;
    Index steps = 0;
    bool x0_from_scenario = false;
    std::uint64_t seed = 0;
    std::optional<double> attack_start;  // earliest attack start time
    double consensus_error_before_attack = 0.0;  // at attack_start, or t_end
    double final_consensus_error = 0.0;
    double consensus_eps = 1e-3;                 // tolerances.consensus_eps, or this default
    // Earliest sample from which the error stays within consensus_eps up to
    // the attack (or t_end); empty if it never settles.
    std::optional<double> consensus_reached_at;
    bool final_consensus = false;                // final error within consensus_eps
    std::vector<Vector> final_plant_states;      // per agent
};

struct AnalyzeOptions {
    std::optional<double> rank_rtol;
    std::uint64_t seed = 0;
    std::vector<SciConvention> conventions{SciConvention::diagonalizing};
    bool allow_large = false;
    Index audit_samples = 8;
};

AnalysisReport analyze(const Scenario& s, const AnalyzeOptions& opts);
TopologySummary topology_summary(const LaplacianPartition& part, const DirectedGraph& g);
ZerosSummary zeros_summary(const Scenario& s, std::uint64_t seed, Index audit_samples = 8);
SimulationSummary simulation_summary(const Scenario& s, const SimulationSetup& setup, const Trajectory& t,
                                     std::uint64_t seed);

void to_json(nlohmann::json& j, const AnalysisReport& r);
void from_json(const nlohmann::json& j, AnalysisReport& r);
void to_json(nlohmann::json& j, const SciReport& r);
void from_json(const nlohmann::json& j, SciReport& r);
void to_json(nlohmann::json& j, const AttackSetSolution& r);
void from_json(const nlohmann::json& j, AttackSetSolution& r);
void to_json(nlohmann::json& j, const ZerosSummary& r);
void from_json(const nlohmann::json& j, ZerosSummary& r);
void to_json(nlohmann::json& j, const SimulationSummary& r);
void from_json(const nlohmann::json& j, SimulationSummary& r);

// Pretty-printed JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

std::string render_text(const AnalysisReport& r);
std::string render_text(const std::vector<SciReport>& reports);
std::string render_text(const AttackSetSolution& r);
std::string render_text(const ZerosSummary& r);
std::string render_text(const SimulationSummary& r);

}  // namespace mascyber

namespace nlohmann {

template <>
struct adl_serializer<std::complex<double>> {
    static void to_json(json& j, const std::complex<double>& c) { j = {{"re", c.real()}, {"im", c.imag()}}; }
    static void from_json(const json& j, std::complex<double>& c) {
        c = {j.at("re").get<double>(), j.at("im").get<double>()};
    }
};

template <typename T>
struct adl_serializer<std::optional<T>> {
    static void to_json(json& j, const std::optional<T>& v) {
        if (v) {
            j = *v;
        } else {
            j = nullptr;
        }
    }
    static void from_json(const json& j, std::optional<T>& v) {
        if (j.is_null()) {
            v.reset();
        } else {
            v = j.get<T>();
        }
    }
};

// Matrices as {"rows", "cols", "data": [[...], ...]} so empty shapes survive
// a round trip.
template <typename Scalar, int R, int C, int O, int MR, int MC>
struct adl_serializer<Eigen::Matrix<Scalar, R, C, O, MR, MC>> {
    using M = Eigen::Matrix<Scalar, R, C, O, MR, MC>;
    static void to_json(json& j, const M& m) {
        if constexpr (C == 1) {
            j = json::array();
            for (Eigen::Index i = 0; i < m.size(); ++i) j.push_back(m(i));
        } else {
            json data = json::array();
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
                data.push_back(std::move(row));
            }
            j = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
        }
    }
    static void from_json(const json& j, M& m) {
        if constexpr (C == 1) {
            m.resize(static_cast<Eigen::Index>(j.size()));
            for (std::size_t i = 0; i < j.size(); ++i) m(static_cast<Eigen::Index>(i)) = j[i].get<Scalar>();
        } else {
            m.resize(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
            const json& data = j.at("data");
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                for (Eigen::Index c = 0; c < m.cols(); ++c) {
                    m(r, c) = data.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<Scalar>();
                }
            }
        }
    }
};

}  // namespace nlohmann
