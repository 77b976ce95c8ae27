// mascyber: controllability and zero-dynamics analysis of observer-based
// consensus networks under link attacks.
//
//   mascyber analyze SCENARIO [--json] [--out PATH] [--tolerance X] [--seed S]
//   mascyber sci SCENARIO --convention diagonalizing|paper-literal|both
//   mascyber zeros SCENARIO
//   mascyber simulate SCENARIO --out traj.csv
//   mascyber min-attack-set SCENARIO --max-card K
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mascyber/errors.hpp"
#include "mascyber/report.hpp"
#include "mascyber/scenario.hpp"

namespace {

using namespace mascyber;

struct Flags {
    std::string scenario;
    std::string out;
    std::string convention;
    Index max_card = 0;
    std::optional<double> tolerance;
    std::optional<std::uint64_t> seed;
    bool json = false;
    bool allow_large = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("scenario", f.scenario, "scenario JSON file")->required();
    cmd->add_option("--out", f.out, "write the report (CSV for simulate) to PATH");
    cmd->add_option("--tolerance", f.tolerance, "relative rank tolerance, overrides the scenario");
    cmd->add_option("--seed", f.seed, "random seed, overrides the scenario");
    cmd->add_flag("--json", f.json, "machine-readable JSON instead of text");
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) throw ValidationError("--out: cannot write " + out);
    file << text;
}

std::vector<SciConvention> conventions(const Flags& f, const Scenario& s) {
    if (f.convention.empty()) return {s.sci_convention.value_or(SciConvention::diagonalizing)};
    if (f.convention == "both") return {SciConvention::diagonalizing, SciConvention::paper_literal};
    const auto c = parse_sci_convention(f.convention);
    if (!c) throw ValidationError("--convention: expected diagonalizing, paper-literal or both");
    return {*c};
}

int run(const std::string& command, const Flags& f) {
    const Scenario s = load_scenario(f.scenario);
    const std::optional<double> rtol = f.tolerance ? f.tolerance : s.tolerances.rank_rtol;
    if (rtol && !(*rtol > 0.0)) throw ValidationError("--tolerance: must be positive");
    const std::uint64_t seed = f.seed.value_or(s.seed.value_or(0));

    if (command == "analyze") {
        AnalyzeOptions opts;
        opts.rank_rtol = rtol;
        opts.seed = seed;
        opts.conventions = conventions(f, s);
        opts.allow_large = f.allow_large;
        const AnalysisReport r = analyze(s, opts);
        emit(f.json ? dump_json(r) : render_text(r), f.out);
    } else if (command == "sci") {
        const LaplacianPartition part = partition(s.graph, s.attacked);
        std::vector<SciReport> reports;
        for (SciConvention c : conventions(f, s)) reports.push_back(sci_network(part, c, rtol));
        emit(f.json ? dump_json(reports) : render_text(reports), f.out);
    } else if (command == "zeros") {
        const ZerosSummary z = zeros_summary(s, seed);
        emit(f.json ? dump_json(z) : render_text(z), f.out);
    } else if (command == "simulate") {
        const SimulationSetup setup = simulation_setup(s, seed);
        const Trajectory t = simulate(setup);
        if (f.out.empty()) {
            export_trajectory(t, std::cout);
        } else {
            export_trajectory(t, std::filesystem::path(f.out));
            const SimulationSummary summary = simulation_summary(s, setup, t, seed);
            std::cout << (f.json ? dump_json(summary) : render_text(summary));
        }
    } else if (command == "min-attack-set") {
        AttackSetOptions opts;
        opts.max_cardinality = f.max_card;
        opts.convention = conventions(f, s).front();
        opts.rtol = rtol;
        const AttackSetSolution sol = min_attack_set(s.graph, opts);
        emit(f.json ? dump_json(sol) : render_text(sol), f.out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Controllability analysis of consensus networks under link attacks"};
    app.set_version_flag("--version", std::string(mascyber::kToolVersion));
    app.require_subcommand(1);
    Flags flags;

    auto* analyze = app.add_subcommand("analyze", "full report: controllability verdicts, indices, zeros");
    add_common(analyze, flags);
    analyze->add_option("--convention", flags.convention, "diagonalizing, paper-literal or both");
    analyze->add_flag("--allow-large", flags.allow_large, "lift the state-dimension guard of the full-network check");

    auto* sci = app.add_subcommand("sci", "security controllability indices");
    add_common(sci, flags);
    sci->add_option("--convention", flags.convention, "diagonalizing, paper-literal or both");

    auto* zeros = app.add_subcommand("zeros", "invariant zeros, zero directions and the zero-dynamics audit");
    add_common(zeros, flags);

    auto* simulate = app.add_subcommand("simulate", "RK4 simulation; CSV trajectory");
    add_common(simulate, flags);

    auto* mas = app.add_subcommand("min-attack-set", "smallest attacked sets controlling every follower");
    add_common(mas, flags);
    mas->add_option("--max-card", flags.max_card, "largest cardinality to try (default: all agents)")
        ->check(CLI::NonNegativeNumber);
    mas->add_option("--convention", flags.convention, "diagonalizing or paper-literal");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), flags);
    } catch (const mascyber::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mascyber::AssumptionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mascyber::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
