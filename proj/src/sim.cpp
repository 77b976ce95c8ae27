#include "mascyber/sim.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mascyber/errors.hpp"

namespace mascyber {

Vector SignalGenerator::evaluate(double t, Index dim) const {
    switch (kind) {
        case SignalKind::zero:
            return Vector::Zero(dim);
        case SignalKind::constant:
            return value;
        case SignalKind::sinusoid:
            return value * std::sin(frequency * t + phase);
        case SignalKind::step:
            return t >= at ? value : Vector::Zero(value.size());
    }
    return Vector::Zero(dim);
}

const LinkSignal* AttackSignalSpec::link_from(AgentId j) const {
    for (const auto& l : links) {
        if (l.from == j) return &l;
    }
    return nullptr;
}

namespace {

void check_generator(const SignalGenerator& g, Index dim, const std::string& where) {
    if (g.kind != SignalKind::zero && g.value.size() != dim) {
        throw ValidationError(where + ": expected a vector of length " + std::to_string(dim));
    }
    if (g.kind != SignalKind::zero && !g.value.allFinite()) throw ValidationError(where + ": non-finite entries");
}

struct Agents {
    const SimulationSetup& setup;
    std::vector<std::vector<AgentId>> neighbors;   // in-neighbors per agent (index id-1)
    std::vector<const AttackSignalSpec*> attack;   // per agent, or null

    explicit Agents(const SimulationSetup& s) : setup(s) {
        const int N = s.graph.n_agents();
        neighbors.resize(static_cast<std::size_t>(N));
        attack.assign(static_cast<std::size_t>(N), nullptr);
        for (AgentId i = 1; i <= N; ++i) neighbors[static_cast<std::size_t>(i - 1)] = s.graph.in_neighbors(i);
        for (const auto& a : s.attacks) attack[static_cast<std::size_t>(a.target - 1)] = &a;
    }

    bool active(AgentId i, double t) const {
        const auto* a = attack[static_cast<std::size_t>(i - 1)];
        return a != nullptr && t >= a->start_time;
    }
};

// Per-link closed loop: every agent evaluates its observer from the messages
// it actually receives.
Vector per_link_rhs(const Agents& ag, double t, const Vector& x) {
    const AgentDynamics& d = ag.setup.dynamics;
    const Index n = d.n();
    const Index p = d.p();
    const int N = ag.setup.graph.n_agents();
    const Matrix BK = d.B * d.K;
    Vector dx(x.size());
    for (AgentId i = 1; i <= N; ++i) {
        const Index off = static_cast<Index>(i - 1) * 2 * n;
        const auto xi = x.segment(off, n);
        const auto xhi = x.segment(off + n, n);
        const Vector yi = d.C * xi;
        Vector innovation = Vector::Zero(p);
        const auto* spec = ag.active(i, t) ? ag.attack[static_cast<std::size_t>(i - 1)] : nullptr;
        for (AgentId j : ag.neighbors[static_cast<std::size_t>(i - 1)]) {
            Vector xh_recv;
            Vector y_recv;
            if (spec != nullptr) {
                const LinkSignal* link = spec->link_from(j);
                xh_recv = (link ? link->xhat : spec->xhat).evaluate(t, n);
                y_recv = (link ? link->y : spec->y).evaluate(t, p);
            } else {
                const Index joff = static_cast<Index>(j - 1) * 2 * n;
                xh_recv = x.segment(joff + n, n);
                y_recv = d.C * x.segment(joff, n);
            }
            innovation += (y_recv - yi) + d.C * (xhi - xh_recv);
        }
        dx.segment(off, n) = d.A * xi + BK * xhi;
        dx.segment(off + n, n) = (d.A + BK) * xhi + d.H * innovation;
    }
    return dx;
}

template <typename Rhs>
Vector rk4_step(const Rhs& f, double t, const Vector& x, double dt) {
    const Vector k1 = f(t, x);
    const Vector k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Vector k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Vector k4 = f(t + dt, x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Index step_count(const SimulationSetup& s) { return static_cast<Index>(std::llround(s.t_end / s.dt)); }

template <typename Rhs>
Trajectory integrate(const SimulationSetup& s, const Rhs& f) {
    Trajectory traj;
    traj.n = s.dynamics.n();
    traj.n_agents = s.graph.n_agents();
    const Index steps = step_count(s);
    traj.times.reserve(static_cast<std::size_t>(steps + 1));
    traj.states.reserve(static_cast<std::size_t>(steps + 1));
    Vector x = s.x0;
    for (Index k = 0;; ++k) {
        const double t = static_cast<double>(k) * s.dt;
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > s.divergence_limit) {
            std::ostringstream msg;
            msg << "simulation diverged at t = " << t << ": state magnitude exceeds " << s.divergence_limit;
            throw NumericalError(msg.str());
        }
        traj.times.push_back(t);
        traj.consensus_error.push_back(consensus_error(x, traj.n, traj.n_agents));
        traj.states.push_back(x);
        if (k == steps) break;
        x = rk4_step(f, t, x, s.dt);
    }
    return traj;
}

}  // namespace

void validate_setup(const SimulationSetup& s) {
    check_dimensions(s.dynamics);
    const Index n = s.dynamics.n();
    const Index p = s.dynamics.p();
    const int N = s.graph.n_agents();
    if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw ValidationError("sim.dt: must be positive");
    if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) throw ValidationError("sim.t_end: must be nonnegative");
    if (s.x0.size() != 2 * n * N) {
        throw ValidationError("sim.x0: expected " + std::to_string(2 * n * N) + " entries");
    }
    if (!s.x0.allFinite()) throw ValidationError("sim.x0: non-finite entries");
    std::vector<bool> seen(static_cast<std::size_t>(N) + 1, false);
    for (std::size_t k = 0; k < s.attacks.size(); ++k) {
        const auto& a = s.attacks[k];
        const std::string where = "sim.attacks[" + std::to_string(k) + "]";
        if (a.target < 1 || a.target > N) throw ValidationError(where + ".target: unknown agent id");
        if (seen[static_cast<std::size_t>(a.target)]) throw ValidationError(where + ".target: agent attacked twice");
        seen[static_cast<std::size_t>(a.target)] = true;
        if (!(a.start_time >= 0.0)) throw ValidationError(where + ".start_time: must be nonnegative");
        if (a.start_time > s.t_end) throw ValidationError(where + ".start_time: after t_end");
        check_generator(a.xhat, n, where + ".xhat");
        check_generator(a.y, p, where + ".y");
        const auto nbrs = s.graph.in_neighbors(a.target);
        for (std::size_t l = 0; l < a.links.size(); ++l) {
            const auto& link = a.links[l];
            const std::string lw = where + ".links[" + std::to_string(l) + "]";
            if (std::find(nbrs.begin(), nbrs.end(), link.from) == nbrs.end()) {
                throw ValidationError(lw + ".from: agent " + std::to_string(link.from) + " does not transmit to " +
                                      std::to_string(a.target));
            }
            check_generator(link.xhat, n, lw + ".xhat");
            check_generator(link.y, p, lw + ".y");
        }
    }
}

double consensus_error(const Vector& stacked, Index n, int n_agents) {
    double worst = 0.0;
    for (int i = 0; i < n_agents; ++i) {
        for (int j = i + 1; j < n_agents; ++j) {
            const double d = (stacked.segment(i * 2 * n, n) - stacked.segment(j * 2 * n, n)).norm();
            worst = std::max(worst, d);
        }
    }
    return worst;
}

Trajectory simulate(const SimulationSetup& s) {
    validate_setup(s);
    const Agents ag(s);
    return integrate(s, [&](double t, const Vector& x) { return per_link_rhs(ag, t, x); });
}

Vector aggregate_attack_at(const AgentDynamics& d, const DirectedGraph& g, const AttackSignalSpec& spec, double t) {
    std::vector<LinkAttack> links;
    for (AgentId j : g.in_neighbors(spec.target)) {
        const LinkSignal* link = spec.link_from(j);
        links.push_back({(link ? link->xhat : spec.xhat).evaluate(t, d.n()),
                         (link ? link->y : spec.y).evaluate(t, d.p())});
    }
    return aggregate_attack_input(d, links);
}

StackedSystem stacked_system(const CheckMatrices& cm, const DirectedGraph& g, const std::vector<bool>& active) {
    const int N = g.n_agents();
    Matrix Lq = laplacian(g);
    for (int i = 0; i < N; ++i) {
        if (active[static_cast<std::size_t>(i)]) {
            const double degree = Lq(i, i);
            Lq.row(i).setZero();
            Lq(i, i) = degree;
        }
    }
    StackedSystem sys;
    sys.A = kron(Matrix::Identity(N, N), cm.closed_loop()) + kron(Lq, cm.coupling());
    Matrix route = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i) route(i, i) = active[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    sys.B = kron(route, cm.H_a);
    return sys;
}

double aggregate_equivalence_check(const SimulationSetup& s) {
    validate_setup(s);
    const Agents ag(s);
    const CheckMatrices cm = build_check_matrices(s.dynamics);
    const int N = s.graph.n_agents();
    const Index p = s.dynamics.p();

    // The stacked model switches whenever an attack starts; cache one system
    // per activation pattern.
    std::vector<std::pair<std::vector<bool>, StackedSystem>> cache;
    const auto system_at = [&](double t) -> const StackedSystem& {
        std::vector<bool> active(static_cast<std::size_t>(N), false);
        for (AgentId i = 1; i <= N; ++i) active[static_cast<std::size_t>(i - 1)] = ag.active(i, t);
        for (const auto& [key, sys] : cache) {
            if (key == active) return sys;
        }
        cache.emplace_back(active, stacked_system(cm, s.graph, active));
        return cache.back().second;
    };
    cache.reserve(s.attacks.size() + 2);

    const auto stacked_rhs = [&](double t, const Vector& x) {
        const StackedSystem& sys = system_at(t);
        Vector a = Vector::Zero(p * N);
        for (const auto& spec : s.attacks) {
            if (t >= spec.start_time) {
                a.segment(static_cast<Index>(spec.target - 1) * p, p) = aggregate_attack_at(s.dynamics, s.graph, spec, t);
            }
        }
        return Vector(sys.A * x + sys.B * a);
    };

    const Trajectory per_link = integrate(s, [&](double t, const Vector& x) { return per_link_rhs(ag, t, x); });
    const Trajectory stacked = integrate(s, stacked_rhs);
    double worst = 0.0;
    for (std::size_t k = 0; k < per_link.states.size(); ++k) {
        worst = std::max(worst, (per_link.states[k] - stacked.states[k]).cwiseAbs().maxCoeff());
    }
    return worst;
}

Vector random_initial_state(Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vector x(dim);
    for (Index i = 0; i < dim; ++i) x(i) = unit(rng);
    return x;
}

namespace {

// Positional decimal with 17 significant digits, never exponent notation.
std::string decimal17(double v) {
    if (v == 0.0 || !std::isfinite(v)) {
        std::ostringstream o;
        o << v;
        return o.str();
    }
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(v))));
    const int decimals = std::max(0, 16 - exponent);
    std::array<char, 400> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

void export_trajectory(const Trajectory& t, std::ostream& out) {
    if (t.times.empty()) throw ValidationError("export: trajectory is empty");
    out << "t,agent";
    for (Index k = 1; k <= t.n; ++k) out << ",x" << k;
    for (Index k = 1; k <= t.n; ++k) out << ",xhat" << k;
    out << '\n';
    for (std::size_t s = 0; s < t.times.size(); ++s) {
        const std::string time = decimal17(t.times[s]);
        for (int i = 0; i < t.n_agents; ++i) {
            out << time << ',' << (i + 1);
            const auto block = t.states[s].segment(static_cast<Index>(i) * 2 * t.n, 2 * t.n);
            for (Index k = 0; k < 2 * t.n; ++k) out << ',' << decimal17(block(k));
            out << '\n';
        }
    }
}

void export_trajectory(const Trajectory& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("export: cannot open " + path.string() + " for writing");
    export_trajectory(t, out);
    out.flush();
    if (!out) throw ValidationError("export: failed writing " + path.string());
}

Trajectory read_trajectory(std::istream& in) {
    Trajectory t;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("trajectory: missing header");
    const auto columns = std::count(line.begin(), line.end(), ',') + 1;
    if (columns < 4 || (columns - 2) % 2 != 0) throw ValidationError("trajectory: malformed header");
    t.n = static_cast<Index>((columns - 2) / 2);
    std::vector<std::pair<double, std::vector<double>>> rows;
    int max_agent = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        if (static_cast<long>(values.size()) != columns) throw ValidationError("trajectory: ragged row");
        const int agent = static_cast<int>(values[1]);
        max_agent = std::max(max_agent, agent);
        if (agent == 1) {
            t.times.push_back(values[0]);
            t.states.emplace_back();
        }
        if (t.states.empty()) throw ValidationError("trajectory: rows must start with agent 1");
        Vector& x = t.states.back();
        x.conservativeResize(static_cast<Index>(agent) * 2 * t.n);
        for (Index k = 0; k < 2 * t.n; ++k) x(static_cast<Index>(agent - 1) * 2 * t.n + k) = values[static_cast<std::size_t>(2 + k)];
    }
    t.n_agents = max_agent;
    for (const auto& x : t.states) t.consensus_error.push_back(consensus_error(x, t.n, t.n_agents));
    return t;
}

}  // namespace mascyber
