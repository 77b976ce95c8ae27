#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "mascyber/errors.hpp"
#include "mascyber/sim.hpp"

using namespace mascyber;

namespace {

SignalGenerator constant(std::initializer_list<double> v) {
    SignalGenerator g;
    g.kind = SignalKind::constant;
    g.value = Eigen::Map<const Vector>(v.begin(), static_cast<Index>(v.size()));
    return g;
}

SignalGenerator sinusoid(std::initializer_list<double> amp, double freq, double phase = 0.0) {
    SignalGenerator g = constant(amp);
    g.kind = SignalKind::sinusoid;
    g.frequency = freq;
    g.phase = phase;
    return g;
}

SimulationSetup six_agent_setup(double t_end, double dt) {
    SimulationSetup s;
    s.dynamics = fixtures::six_agent_dynamics();
    s.graph = fixtures::six_agent_graph();
    s.t_end = t_end;
    s.dt = dt;
    s.x0 = random_initial_state(24, 7);
    return s;
}

void attack_all(SimulationSetup& s, double start, const std::vector<SignalGenerator>& y,
                const std::vector<SignalGenerator>& xhat) {
    for (std::size_t k = 0; k < fixtures::six_agent_attacked().size(); ++k) {
        AttackSignalSpec a;
        a.target = fixtures::six_agent_attacked()[k];
        a.start_time = start;
        a.y = y[k % y.size()];
        a.xhat = xhat[k % xhat.size()];
        s.attacks.push_back(a);
    }
}

}  // namespace

TEST(Simulate, UnattackedNetworkReachesConsensus) {
    const auto t = simulate(six_agent_setup(30.0, 0.01));
    ASSERT_EQ(t.times.size(), 3001u);
    EXPECT_LT(t.consensus_error.back(), 1e-3);
    EXPECT_LT(t.consensus_error[2000], t.consensus_error[1000]);
    EXPECT_LT(t.consensus_error[1000], t.consensus_error[0]);
}

TEST(Simulate, IdenticalConstantAttackGivesNewConsensus) {
    SimulationSetup s = six_agent_setup(60.0, 0.01);
    attack_all(s, 30.0, {constant({1, 1})}, {SignalGenerator{}});
    const auto t = simulate(s);
    EXPECT_LT(t.consensus_error[3000], 1e-3);
    EXPECT_LT(t.consensus_error.back(), 1e-2);
    // The common value moved to the injected output.
    EXPECT_NEAR(t.states.back()(0), 1.0, 1e-2);
    EXPECT_NEAR(t.states.back()(1), 1.0, 1e-2);
}

TEST(Simulate, DistinctAttacksBreakConsensus) {
    SimulationSetup s = six_agent_setup(60.0, 0.01);
    attack_all(s, 30.0, {constant({1, 1}), constant({-2, -2}), constant({3, 3})}, {SignalGenerator{}});
    const auto t = simulate(s);
    EXPECT_LT(t.consensus_error[3000], 1e-3);
    EXPECT_GT(t.consensus_error.back(), 1.0);
}

TEST(Simulate, TrivialDynamicsStayPut) {
    SimulationSetup s = six_agent_setup(5.0, 0.1);
    s.dynamics.A.setZero();
    s.dynamics.B.setZero();
    s.dynamics.H.setZero();
    const auto t = simulate(s);
    EXPECT_EQ(t.states.back(), s.x0);
}

TEST(Simulate, DivergenceGuard) {
    SimulationSetup s = six_agent_setup(20.0, 0.01);
    s.dynamics.A = 5.0 * Matrix::Identity(2, 2);
    s.dynamics.K.setZero();
    try {
        simulate(s);
        FAIL() << "expected divergence";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("diverged at t ="), std::string::npos);
    }
}

TEST(Simulate, ValidationErrors) {
    SimulationSetup s = six_agent_setup(10.0, 0.01);
    s.x0 = Vector::Zero(5);
    EXPECT_THROW(simulate(s), ValidationError);
    s = six_agent_setup(10.0, 0.0);
    EXPECT_THROW(simulate(s), ValidationError);
    s = six_agent_setup(10.0, 0.01);
    attack_all(s, 11.0, {SignalGenerator{}}, {SignalGenerator{}});
    EXPECT_THROW(simulate(s), ValidationError);
    s = six_agent_setup(10.0, 0.01);
    attack_all(s, 1.0, {constant({1, 1, 1})}, {SignalGenerator{}});
    EXPECT_THROW(simulate(s), ValidationError);
    s = six_agent_setup(10.0, 0.01);
    attack_all(s, 1.0, {SignalGenerator{}}, {SignalGenerator{}});
    s.attacks[0].links.push_back({1, SignalGenerator{}, SignalGenerator{}});  // 1 does not transmit to 4
    EXPECT_THROW(simulate(s), ValidationError);
}

TEST(Equivalence, SinusoidAttacks) {
    SimulationSetup s = six_agent_setup(60.0, 1e-3);
    attack_all(s, 10.0, {sinusoid({1, -0.5}, 0.7), sinusoid({0.3, 0.2}, 1.3, 0.4), sinusoid({-1, 1}, 0.2)},
               {sinusoid({0.5, 0.1}, 0.9), SignalGenerator{}});
    s.attacks[0].links.push_back({3, constant({0.2, 0.1}), sinusoid({1, 1}, 2.0)});
    EXPECT_LE(aggregate_equivalence_check(s), 1e-6);
}

TEST(Equivalence, NoAttack) { EXPECT_LE(aggregate_equivalence_check(six_agent_setup(20.0, 0.01)), 1e-8); }

TEST(Equivalence, SingleIsolatedAgent) {
    SimulationSetup s;
    s.dynamics = fixtures::six_agent_dynamics();
    s.graph = DirectedGraph(1, {});
    s.t_end = 2.0;
    s.dt = 0.01;
    s.x0 = random_initial_state(4, 3);
    EXPECT_EQ(aggregate_equivalence_check(s), 0.0);
}

TEST(Rk4, FourthOrderConvergence) {
    auto final_state = [](double dt) {
        SimulationSetup s = six_agent_setup(4.0, dt);
        attack_all(s, 0.0, {sinusoid({1, -0.5}, 1.1)}, {sinusoid({0.2, 0.4}, 0.6)});
        return simulate(s).states.back();
    };
    const double dt = 0.1;
    const Vector ref = final_state(dt / 8);
    const double e1 = (final_state(dt) - ref).norm();
    const double e2 = (final_state(dt / 2) - ref).norm();
    const double ratio = e1 / e2;
    EXPECT_GE(ratio, 8.0);
    EXPECT_LE(ratio, 32.0);
}

TEST(ConsensusError, PermutationInvariant) {
    const Vector x = random_initial_state(12, 4);
    Vector swapped = x;
    swapped.segment(0, 4) = x.segment(8, 4);
    swapped.segment(8, 4) = x.segment(0, 4);
    EXPECT_DOUBLE_EQ(consensus_error(x, 2, 3), consensus_error(swapped, 2, 3));
}

TEST(Export, TwoSampleTrajectory) {
    const auto t = simulate(six_agent_setup(0.01, 0.01));
    std::ostringstream out;
    export_trajectory(t, out);
    const std::string csv = out.str();
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 * 6 + 1);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,agent,x1,x2,xhat1,xhat2");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Export, RoundTripAndDeterminism) {
    SimulationSetup s = six_agent_setup(2.0, 0.05);
    attack_all(s, 1.0, {constant({1, 1})}, {SignalGenerator{}});
    const auto t = simulate(s);
    std::ostringstream a, b;
    export_trajectory(t, a);
    export_trajectory(simulate(s), b);
    EXPECT_EQ(a.str(), b.str());
    std::istringstream in(a.str());
    const auto back = read_trajectory(in);
    ASSERT_EQ(back.states.size(), t.states.size());
    EXPECT_EQ(back.n_agents, 6);
    for (std::size_t k = 0; k < t.states.size(); ++k) {
        EXPECT_NEAR(back.times[k], t.times[k], 1e-12);
        EXPECT_LE((back.states[k] - t.states[k]).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Export, DecimalNotationWithSeventeenDigits) {
    Trajectory t;
    t.n = 1;
    t.n_agents = 1;
    t.times = {0.0};
    t.states = {(Vector(2) << 1.25e-7, -123456.789).finished()};
    std::ostringstream out;
    export_trajectory(t, out);
    const std::string csv = out.str();
    const std::string row = csv.substr(csv.find('\n') + 1);
    EXPECT_EQ(row, "0,1,0.00000012499999999999999,-123456.78900000000\n");
    std::istringstream in(csv);
    const auto back = read_trajectory(in);
    EXPECT_EQ(back.states.front()(0), 1.25e-7);
    EXPECT_EQ(back.states.front()(1), -123456.789);
}

TEST(Export, EmptyTrajectoryRejected) {
    std::ostringstream out;
    EXPECT_THROW(export_trajectory(Trajectory{}, out), ValidationError);
}
