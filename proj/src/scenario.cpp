#include "mascyber/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "mascyber/errors.hpp"
#include "json.hpp"

namespace mascyber {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ValidationError(path + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            fail(join(path, key), "unknown field");
        }
    }
    return j;
}

const json& required(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "missing required field");
    return *it;
}

const json* optional_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

long long integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long long>();
}

Index dimension(const json& j, const std::string& path) {
    const long long v = integer(j, path);
    if (v < 1 || v > 10000) fail(path, "expected a positive dimension");
    return static_cast<Index>(v);
}

Vector vector_of(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], at_index(path, i));
    return v;
}

Matrix grid(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rp = at_index(path, r);
        if (!j[r].is_array()) fail(rp, "expected a row of numbers");
        if (j[r].size() != cols) {
            fail(rp, "row has " + std::to_string(j[r].size()) + " entries, expected " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = number(j[r][c], at_index(rp, c));
        }
    }
    if (cols == 0) fail(path, "rows must be nonempty");
    return m;
}

void expect_shape(const Matrix& m, Index rows, Index cols, const std::string& path) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream msg;
        msg << "expected " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
        fail(path, msg.str());
    }
}

AgentId agent_id(const json& j, const std::string& path, int n_agents) {
    const long long v = integer(j, path);
    if (v < 1 || v > n_agents) fail(path, "unknown agent id " + std::to_string(v));
    return static_cast<AgentId>(v);
}

SignalGenerator generator(const json& j, const std::string& path, Index dim) {
    if (!j.is_object()) fail(path, "expected an object");
    const json& kind = required(j, path, "kind");
    if (!kind.is_string()) fail(join(path, "kind"), "expected a string");
    const std::string k = kind.get<std::string>();
    SignalGenerator g;
    if (k == "zero") {
        object(j, path, {"kind"});
        g.kind = SignalKind::zero;
    } else if (k == "constant") {
        object(j, path, {"kind", "value"});
        g.kind = SignalKind::constant;
        g.value = vector_of(required(j, path, "value"), join(path, "value"));
    } else if (k == "sinusoid") {
        object(j, path, {"kind", "amplitude", "frequency", "phase"});
        g.kind = SignalKind::sinusoid;
        g.value = vector_of(required(j, path, "amplitude"), join(path, "amplitude"));
        g.frequency = number(required(j, path, "frequency"), join(path, "frequency"));
        if (const json* ph = optional_field(j, "phase")) g.phase = number(*ph, join(path, "phase"));
    } else if (k == "step") {
        object(j, path, {"kind", "value", "at"});
        g.kind = SignalKind::step;
        g.value = vector_of(required(j, path, "value"), join(path, "value"));
        g.at = number(required(j, path, "at"), join(path, "at"));
    } else {
        fail(join(path, "kind"), "unknown signal kind '" + k + "' (zero, constant, sinusoid, step)");
    }
    if (g.kind != SignalKind::zero && g.value.size() != dim) {
        const char* field = g.kind == SignalKind::sinusoid ? "amplitude" : "value";
        fail(join(path, field), "expected " + std::to_string(dim) + " entries, got " + std::to_string(g.value.size()));
    }
    return g;
}

DirectedGraph parse_graph(const json& j) {
    object(j, "graph", {"n_agents", "edges"});
    const long long n = integer(required(j, "graph", "n_agents"), "graph.n_agents");
    if (n < 1 || n > 100000) fail("graph.n_agents", "expected a positive agent count");
    const int N = static_cast<int>(n);
    const json& edges = required(j, "graph", "edges");
    if (!edges.is_array()) fail("graph.edges", "expected an array of [from, to] pairs");
    std::vector<Edge> out;
    std::set<std::pair<AgentId, AgentId>> seen;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::string ep = at_index("graph.edges", k);
        const json& e = edges[k];
        if (!e.is_array()) fail(ep, "expected a [from, to] pair");
        if (e.size() == 3) fail(ep, "weighted edges are not supported; edges are unweighted [from, to] pairs");
        if (e.size() != 2) fail(ep, "expected a [from, to] pair");
        const AgentId from = agent_id(e[0], at_index(ep, 0), N);
        const AgentId to = agent_id(e[1], at_index(ep, 1), N);
        if (from == to) fail(ep, "self-loop on agent " + std::to_string(from));
        if (!seen.insert({from, to}).second) {
            fail(ep, "duplicate edge " + std::to_string(from) + " -> " + std::to_string(to));
        }
        out.push_back({from, to});
    }
    return DirectedGraph(N, std::move(out));
}

AttackSignalSpec parse_attack(const json& j, const std::string& path, const Scenario& sc) {
    object(j, path, {"target", "start_time", "xhat", "y", "links"});
    const Index n = sc.dynamics.n();
    const Index p = sc.dynamics.p();
    const int N = sc.graph.n_agents();
    AttackSignalSpec a;
    a.target = agent_id(required(j, path, "target"), join(path, "target"), N);
    if (!std::binary_search(sc.attacked.begin(), sc.attacked.end(), a.target)) {
        fail(join(path, "target"), "agent " + std::to_string(a.target) + " is not in the attacked set");
    }
    if (const json* st = optional_field(j, "start_time")) a.start_time = number(*st, join(path, "start_time"));
    if (const json* xh = optional_field(j, "xhat")) a.xhat = generator(*xh, join(path, "xhat"), n);
    if (const json* y = optional_field(j, "y")) a.y = generator(*y, join(path, "y"), p);
    if (const json* links = optional_field(j, "links")) {
        const std::string lp = join(path, "links");
        if (!links->is_array()) fail(lp, "expected an array");
        const auto nbrs = sc.graph.in_neighbors(a.target);
        for (std::size_t k = 0; k < links->size(); ++k) {
            const std::string ep = at_index(lp, k);
            const json& lj = (*links)[k];
            object(lj, ep, {"from", "xhat", "y"});
            LinkSignal l;
            l.from = agent_id(required(lj, ep, "from"), join(ep, "from"), N);
            if (std::find(nbrs.begin(), nbrs.end(), l.from) == nbrs.end()) {
                fail(join(ep, "from"), "agent " + std::to_string(l.from) + " does not transmit to agent " +
                                           std::to_string(a.target));
            }
            if (a.link_from(l.from) != nullptr) fail(join(ep, "from"), "link listed twice");
            const json* xh = optional_field(lj, "xhat");
            const json* y = optional_field(lj, "y");
            l.xhat = xh ? generator(*xh, join(ep, "xhat"), n) : a.xhat;
            l.y = y ? generator(*y, join(ep, "y"), p) : a.y;
            a.links.push_back(std::move(l));
        }
    }
    return a;
}

SimSettings parse_sim(const json& j, const Scenario& sc) {
    object(j, "sim", {"t_end", "dt", "x0", "attacks"});
    SimSettings s;
    s.t_end = number(required(j, "sim", "t_end"), "sim.t_end");
    s.dt = number(required(j, "sim", "dt"), "sim.dt");
    if (s.t_end < 0.0) fail("sim.t_end", "must be nonnegative");
    if (s.dt <= 0.0) fail("sim.dt", "must be positive");
    if (const json* x0 = optional_field(j, "x0")) {
        s.x0 = vector_of(*x0, "sim.x0");
        const Index expected = 2 * sc.dynamics.n() * sc.graph.n_agents();
        if (s.x0->size() != expected) {
            fail("sim.x0", "expected " + std::to_string(expected) + " entries, got " + std::to_string(s.x0->size()));
        }
    }
    if (const json* attacks = optional_field(j, "attacks")) {
        if (!attacks->is_array()) fail("sim.attacks", "expected an array");
        std::set<AgentId> targets;
        for (std::size_t k = 0; k < attacks->size(); ++k) {
            const std::string ap = at_index("sim.attacks", k);
            s.attacks.push_back(parse_attack((*attacks)[k], ap, sc));
            if (!targets.insert(s.attacks.back().target).second) fail(join(ap, "target"), "agent attacked twice");
            if (s.attacks.back().start_time > s.t_end) fail(join(ap, "start_time"), "after sim.t_end");
            if (s.attacks.back().start_time < 0.0) fail(join(ap, "start_time"), "must be nonnegative");
        }
    }
    return s;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("sha256: digest computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

Scenario parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("syntax: ") + e.what());
    }
    object(root, "", {"dims", "matrices", "graph", "attacked", "tolerances", "sci_convention", "seed", "sim"});

    Scenario sc;
    const json& dims = object(required(root, "", "dims"), "dims", {"n", "m", "p"});
    const Index n = dimension(required(dims, "dims", "n"), "dims.n");
    const Index m = dimension(required(dims, "dims", "m"), "dims.m");
    const Index p = dimension(required(dims, "dims", "p"), "dims.p");

    const json& mats = object(required(root, "", "matrices"), "matrices", {"A", "B", "C", "H", "K"});
    auto read = [&](const char* name, Index rows, Index cols) {
        const std::string path = join("matrices", name);
        Matrix g = grid(required(mats, "matrices", name), path);
        expect_shape(g, rows, cols, path);
        return g;
    };
    sc.dynamics.A = read("A", n, n);
    sc.dynamics.B = read("B", n, m);
    sc.dynamics.C = read("C", p, n);
    sc.dynamics.H = read("H", n, p);
    sc.dynamics.K = read("K", m, n);
    check_dimensions(sc.dynamics);

    sc.graph = parse_graph(required(root, "", "graph"));
    const int N = sc.graph.n_agents();

    const json& attacked = required(root, "", "attacked");
    if (!attacked.is_array()) fail("attacked", "expected an array of agent ids");
    for (std::size_t k = 0; k < attacked.size(); ++k) {
        const AgentId id = agent_id(attacked[k], at_index("attacked", k), N);
        if (std::find(sc.attacked.begin(), sc.attacked.end(), id) != sc.attacked.end()) {
            fail(at_index("attacked", k), "duplicate agent id " + std::to_string(id));
        }
        sc.attacked.push_back(id);
    }
    std::sort(sc.attacked.begin(), sc.attacked.end());

    if (const json* tol = optional_field(root, "tolerances")) {
        object(*tol, "tolerances", {"rank_rtol", "consensus_eps"});
        if (const json* r = optional_field(*tol, "rank_rtol")) {
            sc.tolerances.rank_rtol = number(*r, "tolerances.rank_rtol");
            if (*sc.tolerances.rank_rtol <= 0.0) fail("tolerances.rank_rtol", "must be positive");
        }
        if (const json* e = optional_field(*tol, "consensus_eps")) {
            sc.tolerances.consensus_eps = number(*e, "tolerances.consensus_eps");
            if (*sc.tolerances.consensus_eps <= 0.0) fail("tolerances.consensus_eps", "must be positive");
        }
    }
    if (const json* conv = optional_field(root, "sci_convention")) {
        if (!conv->is_string()) fail("sci_convention", "expected a string");
        sc.sci_convention = parse_sci_convention(conv->get<std::string>());
        if (!sc.sci_convention) fail("sci_convention", "expected 'diagonalizing' or 'paper_literal'");
    }
    if (const json* seed = optional_field(root, "seed")) {
        if (!seed->is_number_unsigned()) fail("seed", "expected a nonnegative integer");
        sc.seed = seed->get<std::uint64_t>();
    }
    if (const json* sim = optional_field(root, "sim")) sc.sim = parse_sim(*sim, sc);

    sc.digest = sha256_hex(root.dump());
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path.string() + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

SimulationSetup simulation_setup(const Scenario& s, std::uint64_t seed) {
    if (!s.sim) throw ValidationError("sim: scenario has no sim section");
    SimulationSetup setup;
    setup.dynamics = s.dynamics;
    setup.graph = s.graph;
    setup.attacks = s.sim->attacks;
    setup.t_end = s.sim->t_end;
    setup.dt = s.sim->dt;
    setup.x0 = s.sim->x0 ? *s.sim->x0 : random_initial_state(2 * s.dynamics.n() * s.graph.n_agents(), seed);
    validate_setup(setup);
    return setup;
}

}  // namespace mascyber
