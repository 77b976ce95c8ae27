#include "mascyber/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "mascyber/errors.hpp"

namespace mascyber {

using nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(PairMethod, {{PairMethod::kalman, "kalman"}, {PairMethod::pbh, "pbh"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SciConvention, {{SciConvention::diagonalizing, "diagonalizing"},
                                             {SciConvention::paper_literal, "paper_literal"}})
NLOHMANN_JSON_SERIALIZE_ENUM(PencilKind, {{PencilKind::attacked, "attacked"}, {PencilKind::followers, "followers"}})

#define PUT(field) j[#field] = r.field
#define GET(field) j.at(#field).get_to(r.field)

void to_json(json& j, const RankResult& r) {
    PUT(rank);
    PUT(tolerance_used);
    PUT(singular_values);
}
void from_json(const json& j, RankResult& r) {
    GET(rank);
    GET(tolerance_used);
    GET(singular_values);
}

void to_json(json& j, const PairTestResult& r) {
    PUT(rank);
    PUT(required);
    PUT(controllable);
    PUT(method);
    PUT(tolerance_used);
}
void from_json(const json& j, PairTestResult& r) {
    GET(rank);
    GET(required);
    GET(controllable);
    GET(method);
    GET(tolerance_used);
}

void to_json(json& j, const AttackedAgentPair& r) {
    PUT(agent);
    PUT(in_degree);
    PUT(result);
}
void from_json(const json& j, AttackedAgentPair& r) {
    GET(agent);
    GET(in_degree);
    GET(result);
}

void to_json(json& j, const FullNetworkReport& r) {
    PUT(attacked_pairs);
    PUT(follower_pair);
    PUT(mk_columns_nonzero);
    PUT(mk_first_zero_column_power);
    PUT(s_rank);
    PUT(s_required);
    PUT(w1_rows);
    PUT(w1_cols);
    PUT(theorem_verdict);
    PUT(direct_rank);
    PUT(direct_required);
    PUT(direct_verdict);
    PUT(scaled_rank);
    PUT(column_norm_log10_span);
    PUT(attacked_kalman_rank);
    PUT(kernel_image_intersection_dim);
    PUT(factorization_rel_error);
    PUT(agreement_note);
    PUT(short_circuited);
}
void from_json(const json& j, FullNetworkReport& r) {
    GET(attacked_pairs);
    GET(follower_pair);
    GET(mk_columns_nonzero);
    GET(mk_first_zero_column_power);
    GET(s_rank);
    GET(s_required);
    GET(w1_rows);
    GET(w1_cols);
    GET(theorem_verdict);
    GET(direct_rank);
    GET(direct_required);
    GET(direct_verdict);
    GET(scaled_rank);
    GET(column_norm_log10_span);
    GET(attacked_kalman_rank);
    GET(kernel_image_intersection_dim);
    GET(factorization_rel_error);
    GET(agreement_note);
    GET(short_circuited);
}

void to_json(json& j, const EigenCluster& r) {
    PUT(value);
    PUT(algebraic);
    PUT(geometric);
    PUT(tolerance_used);
}
void from_json(const json& j, EigenCluster& r) {
    GET(value);
    GET(algebraic);
    GET(geometric);
    GET(tolerance_used);
}

void to_json(json& j, const EigvecSpanReport& r) {
    PUT(holds);
    PUT(eigenvalues);
    PUT(clusters);
    PUT(basis_conditioning);
}
void from_json(const json& j, EigvecSpanReport& r) {
    GET(holds);
    GET(eigenvalues);
    GET(clusters);
    GET(basis_conditioning);
}

void to_json(json& j, const ModeResult& r) {
    PUT(eigenvalue);
    PUT(multiplicity);
    PUT(result);
}
void from_json(const json& j, ModeResult& r) {
    GET(eigenvalue);
    GET(multiplicity);
    GET(result);
}

void to_json(json& j, const FollowerReport& r) {
    PUT(span);
    PUT(attacked_pairs);
    PUT(graph_pair);
    PUT(modes);
    PUT(verdict);
}
void from_json(const json& j, FollowerReport& r) {
    GET(span);
    GET(attacked_pairs);
    GET(graph_pair);
    GET(modes);
    GET(verdict);
}

void to_json(json& j, const SciReport& r) {
    PUT(convention);
    json per = json::object();
    for (const auto& [id, v] : r.per_agent) per[std::to_string(id)] = v;
    j["per_agent"] = std::move(per);
    PUT(network_sci);
    PUT(n_followers);
    PUT(full_control);
    PUT(tolerance_used);
    PUT(monotone);
}
void from_json(const json& j, SciReport& r) {
    GET(convention);
    r.per_agent.clear();
    for (const auto& [key, v] : j.at("per_agent").items()) r.per_agent[std::stoi(key)] = v.get<Index>();
    GET(network_sci);
    GET(n_followers);
    GET(full_control);
    GET(tolerance_used);
    GET(monotone);
}

void to_json(json& j, const AttackSetSolution& r) {
    PUT(minimal_cardinality);
    PUT(witness_sets);
    PUT(evaluated_subsets);
    PUT(skipped_subsets);
    PUT(diagnostic);
}
void from_json(const json& j, AttackSetSolution& r) {
    GET(minimal_cardinality);
    GET(witness_sets);
    GET(evaluated_subsets);
    GET(skipped_subsets);
    GET(diagnostic);
}

void to_json(json& j, const DynamicsValidation& r) {
    PUT(controllability);
    PUT(observability);
    PUT(observer_gain);
    PUT(controllable);
    PUT(observable);
    PUT(gain_full_column_rank);
}
void from_json(const json& j, DynamicsValidation& r) {
    GET(controllability);
    GET(observability);
    GET(observer_gain);
    GET(controllable);
    GET(observable);
    GET(gain_full_column_rank);
}

void to_json(json& j, const InvariantZero& r) {
    PUT(value);
    PUT(rank);
}
void from_json(const json& j, InvariantZero& r) {
    GET(value);
    GET(rank);
}

void to_json(json& j, const ZeroDirection& r) {
    PUT(zero);
    PUT(state_part);
    PUT(input_part);
    PUT(residual);
}
void from_json(const json& j, ZeroDirection& r) {
    GET(zero);
    GET(state_part);
    GET(input_part);
    GET(residual);
}

void to_json(json& j, const Excitation& r) {
    PUT(feasible);
    PUT(reason);
}
void from_json(const json& j, Excitation& r) {
    GET(feasible);
    GET(reason);
}

void to_json(json& j, const ZeroAuditReport& r) {
    PUT(vacuous);
    PUT(note);
    PUT(attacked_zeros);
    PUT(follower_zeros);
    PUT(attacked_directions_checked);
    PUT(follower_directions_checked);
    PUT(annihilation_samples);
    PUT(violations);
    PUT(findings);
}
void from_json(const json& j, ZeroAuditReport& r) {
    GET(vacuous);
    GET(note);
    GET(attacked_zeros);
    GET(follower_zeros);
    GET(attacked_directions_checked);
    GET(follower_directions_checked);
    GET(annihilation_samples);
    GET(violations);
    GET(findings);
}

void to_json(json& j, const ZeroRecord& r) {
    PUT(zero);
    PUT(directions);
    PUT(excitation);
}
void from_json(const json& j, ZeroRecord& r) {
    GET(zero);
    GET(directions);
    GET(excitation);
}

void to_json(json& j, const PencilSummary& r) {
    PUT(kind);
    PUT(state_dim);
    PUT(input_dim);
    PUT(output_dim);
    PUT(normal_rank);
    PUT(no_input_influence);
    PUT(candidates_first);
    PUT(candidates_second);
    PUT(zeros);
}
void from_json(const json& j, PencilSummary& r) {
    GET(kind);
    GET(state_dim);
    GET(input_dim);
    GET(output_dim);
    GET(normal_rank);
    GET(no_input_influence);
    GET(candidates_first);
    GET(candidates_second);
    GET(zeros);
}

void to_json(json& j, const ZerosSummary& r) {
    PUT(seed);
    PUT(confirm_rtol);
    PUT(attacked);
    PUT(followers);
    PUT(audit);
}
void from_json(const json& j, ZerosSummary& r) {
    GET(seed);
    GET(confirm_rtol);
    GET(attacked);
    GET(followers);
    GET(audit);
}

void to_json(json& j, const EigenvalueRecord& r) {
    PUT(value);
    PUT(residual);
}
void from_json(const json& j, EigenvalueRecord& r) {
    GET(value);
    GET(residual);
}

void to_json(json& j, const TopologySummary& r) {
    PUT(n_agents);
    PUT(follower_ids);
    PUT(attacked_ids);
    PUT(L);
    PUT(L_f);
    PUT(l_fa);
    PUT(attacked_in_degrees);
    PUT(eigenvalues);
    PUT(span);
}
void from_json(const json& j, TopologySummary& r) {
    GET(n_agents);
    GET(follower_ids);
    GET(attacked_ids);
    GET(L);
    GET(L_f);
    GET(l_fa);
    GET(attacked_in_degrees);
    GET(eigenvalues);
    GET(span);
}

void to_json(json& j, const ToleranceRecord& r) {
    PUT(rank_rtol);
    PUT(rank_policy);
    PUT(eigenvalue_cluster_rtol);
    PUT(min_basis_conditioning);
    PUT(zero_confirm_rtol);
}
void from_json(const json& j, ToleranceRecord& r) {
    GET(rank_rtol);
    GET(rank_policy);
    GET(eigenvalue_cluster_rtol);
    GET(min_basis_conditioning);
    GET(zero_confirm_rtol);
}

void to_json(json& j, const AnalysisReport& r) {
    PUT(tool_version);
    PUT(scenario_digest);
    PUT(seed);
    PUT(tolerances);
    PUT(dynamics);
    PUT(topology);
    PUT(full_network);
    PUT(followers);
    PUT(sci);
    PUT(zeros);
    PUT(notes);
}
void from_json(const json& j, AnalysisReport& r) {
    GET(tool_version);
    GET(scenario_digest);
    GET(seed);
    GET(tolerances);
    GET(dynamics);
    GET(topology);
    GET(full_network);
    GET(followers);
    GET(sci);
    GET(zeros);
    GET(notes);
}

void to_json(json& j, const SimulationSummary& r) {
    PUT(scenario_digest);
    PUT(t_end);
    PUT(dt);
    PUT(steps);
    PUT(x0_from_scenario);
    PUT(seed);
    PUT(attack_start);
    PUT(consensus_error_before_attack);
    PUT(final_consensus_error);
    PUT(consensus_eps);
    PUT(consensus_reached_at);
    PUT(final_consensus);
    PUT(final_plant_states);
}
void from_json(const json& j, SimulationSummary& r) {
    GET(scenario_digest);
    GET(t_end);
    GET(dt);
    GET(steps);
    GET(x0_from_scenario);
    GET(seed);
    GET(attack_start);
    GET(consensus_error_before_attack);
    GET(final_consensus_error);
    GET(consensus_eps);
    GET(consensus_reached_at);
    GET(final_consensus);
    GET(final_plant_states);
}

#undef PUT
#undef GET

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

TopologySummary topology_summary(const LaplacianPartition& part, const DirectedGraph& g) {
    TopologySummary t;
    t.n_agents = g.n_agents();
    t.follower_ids = part.follower_ids;
    t.attacked_ids = part.attacked_ids;
    t.L = part.L;
    t.L_f = part.L_f;
    t.l_fa = part.l_fa;
    for (Index k = 0; k < part.D_a.rows(); ++k) t.attacked_in_degrees.push_back(part.D_a(k, k));
    t.span = check_eigvec_span(part.L_f);
    const CMatrix Lc = part.L_f.cast<Complex>();
    for (const auto& e : eig(part.L_f)) {
        t.eigenvalues.push_back({e.value, (Lc * e.vector - e.value * e.vector).norm()});
    }
    return t;
}

namespace {

PencilSummary summarize(const RosenbrockPencil& p, const ZeroOptions& zo) {
    PencilSummary s;
    s.kind = p.kind;
    s.state_dim = p.state_dim();
    s.input_dim = p.input_dim();
    s.output_dim = p.C.rows();
    s.normal_rank = p.normal_rank;
    const ZeroSet zs = invariant_zeros(p, zo);
    s.no_input_influence = zs.no_input_influence;
    s.candidates_first = zs.candidates_first;
    s.candidates_second = zs.candidates_second;
    for (const auto& z : zs.zeros) {
        ZeroRecord rec;
        rec.zero = z;
        rec.directions = zero_directions(p, z.value, zo);
        for (const auto& d : rec.directions) rec.excitation.push_back(excitation_feasible(d, p));
        s.zeros.push_back(std::move(rec));
    }
    return s;
}

}  // namespace

ZerosSummary zeros_summary(const Scenario& s, std::uint64_t seed, Index audit_samples) {
    ZeroOptions zo;
    zo.seed = seed;
    ZerosSummary out;
    out.seed = seed;
    out.confirm_rtol = zo.confirm_rtol;
    const LaplacianPartition part = partition(s.graph, s.attacked, true);
    const CheckMatrices cm = build_check_matrices(s.dynamics);
    const NetworkMatrices nm = build_network_matrices(cm, part);
    if (part.n_attacked() > 0) out.attacked = summarize(attacked_pencil(nm, cm, zo), zo);
    if (part.n_attacked() > 0 && part.n_followers() > 0) out.followers = summarize(follower_pencil(nm, cm, part, zo), zo);
    out.audit = zero_dynamics_audit({s.dynamics, cm, part, nm}, zo, audit_samples);
    return out;
}

AnalysisReport analyze(const Scenario& s, const AnalyzeOptions& opts) {
    AnalysisReport r;
    r.tool_version = kToolVersion;
    r.scenario_digest = s.digest;
    r.seed = opts.seed;
    r.tolerances.rank_rtol = opts.rank_rtol;
    r.tolerances.rank_policy = opts.rank_rtol ? "rtol * largest singular value"
                                              : "max(rows, cols) * machine epsilon * largest singular value";
    r.tolerances.eigenvalue_cluster_rtol = 1e-6;
    r.tolerances.min_basis_conditioning = kMinBasisConditioning;
    r.tolerances.zero_confirm_rtol = ZeroOptions{}.confirm_rtol;

    r.dynamics = validate_dynamics(s.dynamics, opts.rank_rtol);
    if (!r.dynamics.passes()) {
        r.notes.push_back("agent dynamics fail validation (controllable " + std::string(r.dynamics.controllable ? "yes" : "no") +
                          ", observable " + (r.dynamics.observable ? "yes" : "no") + ", H full column rank " +
                          (r.dynamics.gain_full_column_rank ? "yes" : "no") + "); verdicts below still computed");
    }

    const LaplacianPartition part = partition(s.graph, s.attacked, true);
    r.topology = topology_summary(part, s.graph);
    const CheckMatrices cm = build_check_matrices(s.dynamics);
    const NetworkMatrices nm = build_network_matrices(cm, part);

    FullNetworkOptions fo;
    fo.rtol = opts.rank_rtol;
    fo.allow_large = opts.allow_large;
    r.full_network = full_network_check(nm, cm, part, fo);
    if (part.n_attacked() > 0) {
        const Index b_rank = rank_with_tolerance(nm.B_star, opts.rank_rtol).rank;
        r.notes.push_back("rank of B* is " + std::to_string(b_rank) + ", so the Kalman rank of (A*, B*) is at least " +
                          std::to_string(b_rank) + " in exact arithmetic");
    }
    r.notes.push_back("w1 is an orthonormal basis of ker(B_a^T): " + std::to_string(r.full_network->w1_rows) + " x " +
                      std::to_string(r.full_network->w1_cols) + ", i.e. (2n - p) N_a columns rather than a square " +
                      "2n N_a matrix");

    if (part.n_followers() > 0 && part.n_attacked() > 0) {
        r.followers = follower_check(nm, part, cm, opts.rank_rtol);
    } else {
        r.notes.push_back("follower conditions skipped: they need at least one follower and one attacked agent");
    }

    if (part.n_attacked() == 0) {
        r.notes.push_back("security indices skipped: no attacked agents");
    } else if (!r.topology.span.holds) {
        r.notes.push_back("security indices skipped: the eigenvectors of L_f do not span the follower space");
    } else {
        for (SciConvention c : opts.conventions) r.sci.push_back(sci_network(part, c, opts.rank_rtol));
    }

    r.zeros = zeros_summary(s, opts.seed, opts.audit_samples);
    return r;
}

SimulationSummary simulation_summary(const Scenario& s, const SimulationSetup& setup, const Trajectory& t,
                                     std::uint64_t seed) {
    SimulationSummary out;
    out.scenario_digest = s.digest;
    out.t_end = setup.t_end;
    out.dt = setup.dt;
    out.steps = static_cast<Index>(t.times.size()) - 1;
    out.x0_from_scenario = s.sim && s.sim->x0.has_value();
    out.seed = seed;
    for (const auto& a : setup.attacks) {
        out.attack_start = out.attack_start ? std::min(*out.attack_start, a.start_time) : a.start_time;
    }
    const double mark = out.attack_start.value_or(setup.t_end);
    std::size_t k = 0;
    while (k + 1 < t.times.size() && t.times[k + 1] <= mark + 0.5 * setup.dt) ++k;
    out.consensus_error_before_attack = t.consensus_error[k];
    out.final_consensus_error = t.consensus_error.back();
    out.consensus_eps = s.tolerances.consensus_eps.value_or(1e-3);
    if (t.consensus_error[k] <= out.consensus_eps) {
        std::size_t first = k;
        while (first > 0 && t.consensus_error[first - 1] <= out.consensus_eps) --first;
        out.consensus_reached_at = t.times[first];
    }
    out.final_consensus = out.final_consensus_error <= out.consensus_eps;
    const Vector& last = t.states.back();
    for (int i = 0; i < t.n_agents; ++i) out.final_plant_states.push_back(last.segment(i * 2 * t.n, t.n));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
}

std::string fmt(Complex c) {
    std::ostringstream o;
    o << std::setprecision(6) << c.real();
    if (c.imag() != 0.0) o << (c.imag() < 0 ? " - " : " + ") << std::abs(c.imag()) << "i";
    return o.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string ids(const std::vector<AgentId>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "}";
}

void pair_line(std::ostream& o, const std::string& label, const PairTestResult& p) {
    o << "  " << std::left << std::setw(44) << label << " rank " << std::setw(4) << p.rank << " / " << std::setw(4)
      << p.required << " " << std::setw(4) << to_string(p.method) << " tol " << fmt(p.tolerance_used)
      << (p.controllable ? "  ok" : "  FAIL") << "\n";
}

void rank_line(std::ostream& o, const std::string& label, const RankResult& r, Index required) {
    o << "  " << std::left << std::setw(44) << label << " rank " << std::setw(4) << r.rank << " / " << std::setw(4)
      << required << "      tol " << fmt(r.tolerance_used) << "\n";
}

void render_sci(std::ostream& o, const SciReport& r) {
    o << "Security index (" << to_string(r.convention) << ")\n";
    for (const auto& [id, v] : r.per_agent) o << "  agent " << std::right << std::setw(4) << id << "  SCI " << v << "\n";
    o << "  network SCI " << r.network_sci << " of " << r.n_followers << " followers (tol "
      << fmt(r.tolerance_used) << "), full control: " << yes_no(r.full_control) << "\n";
}

void render_pencil(std::ostream& o, const PencilSummary& p) {
    o << "  " << to_string(p.kind) << " pencil: state " << p.state_dim << ", input " << p.input_dim << ", output "
      << p.output_dim << ", normal rank " << p.normal_rank << (p.no_input_influence ? ", no input influence" : "")
      << "\n";
    if (p.zeros.empty()) o << "    no finite invariant zeros\n";
    for (const auto& z : p.zeros) {
        o << "    zero " << fmt(z.zero.value) << "  rank " << z.zero.rank << "  directions " << z.directions.size()
          << "\n";
        for (std::size_t k = 0; k < z.directions.size(); ++k) {
            o << "      residual " << fmt(z.directions[k].residual) << "  excitable "
              << yes_no(z.excitation[k].feasible) << " (" << z.excitation[k].reason << ")\n";
        }
    }
}

}  // namespace

std::string render_text(const std::vector<SciReport>& reports) {
    std::ostringstream o;
    for (const auto& r : reports) render_sci(o, r);
    return o.str();
}

std::string render_text(const AttackSetSolution& r) {
    std::ostringstream o;
    o << "Minimum attack set search: " << r.evaluated_subsets << " subsets evaluated, " << r.skipped_subsets.size()
      << " skipped (span assumption fails)\n";
    if (r.minimal_cardinality == 0) {
        o << "  " << r.diagnostic << "\n";
    } else {
        o << "  minimal cardinality " << r.minimal_cardinality << "\n";
        for (const auto& w : r.witness_sets) o << "  witness " << ids(w) << "\n";
    }
    return o.str();
}

std::string render_text(const ZerosSummary& r) {
    std::ostringstream o;
    o << "Invariant zeros (seed " << r.seed << ", confirm rtol " << fmt(r.confirm_rtol) << ")\n";
    if (r.attacked) render_pencil(o, *r.attacked);
    if (r.followers) render_pencil(o, *r.followers);
    o << "  audit: " << r.audit.note << "\n";
    o << "  audit: " << r.audit.annihilation_samples << " annihilation samples, " << r.audit.attacked_directions_checked
      << " attacked and " << r.audit.follower_directions_checked << " follower directions checked, "
      << r.audit.violations << " violations\n";
    for (const auto& f : r.audit.findings) o << "    " << f << "\n";
    return o.str();
}

std::string render_text(const SimulationSummary& r) {
    std::ostringstream o;
    o << "Simulation: t_end " << fmt(r.t_end) << ", dt " << fmt(r.dt) << ", " << r.steps << " steps, x0 "
      << (r.x0_from_scenario ? "from scenario" : "random (seed " + std::to_string(r.seed) + ")") << "\n";
    if (r.attack_start) o << "  attack starts at t = " << fmt(*r.attack_start) << "\n";
    o << "  consensus error before attack " << fmt(r.consensus_error_before_attack) << ", final "
      << fmt(r.final_consensus_error) << " (threshold " << fmt(r.consensus_eps) << ")\n";
    o << "  consensus " << (r.consensus_reached_at ? "reached at t = " + fmt(*r.consensus_reached_at) : "not reached")
      << (r.attack_start ? " before the attack" : "") << "; final state "
      << (r.final_consensus ? "in consensus" : "not in consensus") << "\n";
    for (std::size_t i = 0; i < r.final_plant_states.size(); ++i) {
        o << "  agent " << std::setw(3) << i + 1 << " final x = [";
        for (Index k = 0; k < r.final_plant_states[i].size(); ++k) {
            o << (k ? ", " : "") << fmt(r.final_plant_states[i](k));
        }
        o << "]\n";
    }
    return o.str();
}

std::string render_text(const AnalysisReport& r) {
    std::ostringstream o;
    o << "mascyber " << r.tool_version << "  scenario " << r.scenario_digest.substr(0, 16) << "\n";
    o << "Rank tolerance: " << (r.tolerances.rank_rtol ? "rtol " + fmt(*r.tolerances.rank_rtol) : "default")
      << " (" << r.tolerances.rank_policy << ")\n\n";

    o << "Agent dynamics\n";
    rank_line(o, "controllability of (A, B)", r.dynamics.controllability, static_cast<Index>(r.dynamics.controllability.singular_values.size()));
    rank_line(o, "observability of (A, C)", r.dynamics.observability, static_cast<Index>(r.dynamics.observability.singular_values.size()));
    rank_line(o, "observer gain H", r.dynamics.observer_gain, static_cast<Index>(r.dynamics.observer_gain.singular_values.size()));
    o << "\n";

    const TopologySummary& t = r.topology;
    o << "Topology: " << t.n_agents << " agents, followers " << ids(t.follower_ids) << ", attacked "
      << ids(t.attacked_ids) << "\n";
    for (const auto& e : t.eigenvalues) {
        o << "  eig(L_f) " << std::left << std::setw(24) << fmt(e.value) << " residual " << fmt(e.residual) << "\n";
    }
    o << "  eigenvectors span follower space: " << yes_no(t.span.holds) << " (basis conditioning "
      << fmt(t.span.basis_conditioning) << ")\n\n";

    if (r.full_network) {
        const FullNetworkReport& f = *r.full_network;
        o << "Control of the whole network from the attacked agents\n";
        for (const auto& a : f.attacked_pairs) {
            pair_line(o, "agent " + std::to_string(a.agent) + " (in-degree " + fmt(a.in_degree) + ")", a.result);
        }
        if (f.follower_pair) pair_line(o, "(A_f, A_fa)", *f.follower_pair);
        o << "  M_k columns nonzero: " << yes_no(f.mk_columns_nonzero) << "\n";
        rank_line(o, "S", f.s_rank, f.s_required);
        o << "  sufficient conditions hold: " << yes_no(f.theorem_verdict) << "\n";
        rank_line(o, "Kalman matrix of (A*, B*)", f.direct_rank, f.direct_required);
        rank_line(o, "  with column renormalization", f.scaled_rank, f.direct_required);
        o << "  column norm span: 10^" << fmt(f.column_norm_log10_span) << "\n";
        o << "  full network controllable: " << yes_no(f.direct_verdict) << "\n";
        if (!f.agreement_note.empty()) o << "  note: " << f.agreement_note << "\n";
        o << "\n";
    }

    if (r.followers) {
        const FollowerReport& f = *r.followers;
        o << "Control of the followers through the attacked agents\n";
        o << "  eigenvector span assumption: " << yes_no(f.span.holds) << "\n";
        for (const auto& a : f.attacked_pairs) {
            pair_line(o, "agent " + std::to_string(a.agent) + " (in-degree " + fmt(a.in_degree) + ")", a.result);
        }
        pair_line(o, "(L_f, l_fa)", f.graph_pair);
        for (const auto& m : f.modes) {
            pair_line(o, "mode lambda = " + fmt(m.eigenvalue) + " (x" + std::to_string(m.multiplicity) + ")", m.result);
        }
        o << "  followers controllable: " << yes_no(f.verdict) << "\n\n";
    }

    for (const auto& s : r.sci) render_sci(o, s);
    if (!r.sci.empty()) o << "\n";

    o << render_text(r.zeros);
    if (!r.notes.empty()) {
        o << "\nNotes\n";
        for (const auto& n : r.notes) o << "  - " << n << "\n";
    }
    return o.str();
}

}  // namespace mascyber
