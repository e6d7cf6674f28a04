// Command-line driver: plan, simulate, serve, replay, check.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mrltl/planner/plan_io.hpp"
#include "mrltl/server/server.hpp"
#include "mrltl/sim/simulation.hpp"

using namespace mrltl;

namespace {

enum Exit { kOk = 0, kBadInput = 1, kInfeasible = 2 };

nlohmann::json plans_json(const Simulation& sim) {
    auto json = nlohmann::json::array();
    for (std::size_t i = 0; i < sim.robots().size(); ++i) {
        const auto& m = sim.model(i);
        json.push_back({{"id", m.spec.id},
                        {"task", m.spec.task},
                        {"mode", to_string(m.spec.mode)},
                        {"prefix", m.plan.prefix_regions()},
                        {"suffix", m.plan.suffix_regions()}});
    }
    return json;
}

int cmd_plan(const std::string& scenario, int robot, const std::string& out) {
    const Scenario sc = load_scenario(scenario);
    const RobotSpec& spec = sc.robot(robot);
    const auto pba = build_product(build_cts(sc.workspace, sc.workspace.region_of(spec.pose.position()), sc.connectivity),
                                   translate(parse(spec.task, sc.props), &sc.props));
    const PlanRecord rec{robot, spec.task, find_plan(pba)};
    validate_plan(pba, rec.plan);
    if (out.empty() || out == "-") {
        write_plan(std::cout, rec);
    } else {
        std::ofstream f(out);
        write_plan(f, rec);
        if (!f) throw std::runtime_error("cannot write '" + out + "'");
    }
    return kOk;
}

int cmd_simulate(const std::string& scenario, std::optional<std::uint64_t> seed, std::optional<long> ticks,
                 const std::string& log, const std::string& summary) {
    const Scenario sc = load_scenario(scenario, seed);
    Simulation sim(sc);
    sim.run(ticks.value_or(sc.ticks));
    if (!log.empty()) {
        std::ofstream f(log);
        write_trace(f, sim.trace());
        if (!f) throw std::runtime_error("cannot write '" + log + "'");
    }
    const nlohmann::json out{{"scenario", scenario},
                             {"seed", sc.seed},
                             {"plans", plans_json(sim)},
                             {"trace", to_json(summarize(sim.trace(), sc.params.bounds))},
                             {"diagnostics", to_json(sim.diagnostics())}};
    if (summary.empty() || summary == "-") {
        std::cout << out.dump(2) << '\n';
    } else {
        std::ofstream f(summary);
        f << out.dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write '" + summary + "'");
    }
    return kOk;
}

int cmd_replay(const std::string& log, const std::string& scenario) {
    std::ifstream f(log);
    if (!f) throw std::runtime_error("cannot open '" + log + "'");
    const InputBounds bounds = scenario.empty() ? InputBounds{} : load_scenario(scenario).params.bounds;
    std::cout << to_json(summarize(read_trace(f), bounds)).dump(2) << '\n';
    return kOk;
}

int cmd_check(const std::string& scenario) {
    const Scenario sc = load_scenario(scenario);
    std::cout << "ok: " << sc.workspace.num_regions() << " regions, " << sc.labeled_cells() << " labeled cells, "
              << sc.robots.size() << " robots, " << sc.obstacles.size() << " moving obstacles, " << sc.ticks
              << " ticks\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-robot LTL planning and control"};
    app.require_subcommand(1);

    std::string scenario, out, log, summary;
    int robot = 0;
    std::optional<std::uint64_t> seed;
    std::optional<long> ticks;
    unsigned short port = 8765;

    auto* plan = app.add_subcommand("plan", "synthesize a prefix-suffix plan for one robot");
    plan->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    plan->add_option("--robot", robot)->required();
    plan->add_option("--out", out, "plan file (default stdout)");

    auto* sim = app.add_subcommand("simulate", "run a scenario headless");
    sim->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    sim->add_option("--seed", seed);
    sim->add_option("--ticks", ticks);
    sim->add_option("--log", log, "TraceLog CSV");
    sim->add_option("--summary", summary, "summary JSON (default stdout)");

    auto* serve = app.add_subcommand("serve", "host an interactive websocket session");
    serve->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    serve->add_option("--port", port);
    serve->add_option("--log", log, "TraceLog CSV written on exit");

    auto* replay = app.add_subcommand("replay", "re-derive summary statistics from a TraceLog");
    replay->add_option("--log", log)->required()->check(CLI::ExistingFile);
    replay->add_option("--scenario", scenario, "scenario for input bounds")->check(CLI::ExistingFile);

    auto* check = app.add_subcommand("check", "validate a scenario file");
    check->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*plan) return cmd_plan(scenario, robot, out);
        if (*sim) return cmd_simulate(scenario, seed, ticks, log, summary);
        if (*serve) return run_server(load_scenario(scenario), port, log);
        if (*replay) return cmd_replay(log, scenario);
        if (*check) return cmd_check(scenario);
    } catch (const InfeasibleTask& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kOk;
}
