// Acceptance gate: one PASS/FAIL line per criterion; exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "mrltl/control/mic.hpp"
#include "mrltl/ltl/translate.hpp"
#include "mrltl/planner/product.hpp"
#include "mrltl/sim/simulation.hpp"
#include "support/euler.hpp"
#include "support/lasso_words.hpp"
#include "support/product_oracle.hpp"
#include "support/scenario_checks.hpp"

using namespace mrltl;
using oracle::Verdict;

namespace {

const std::string kDir = MRLTL_SCENARIO_DIR;
const PropositionTable kAB{"a", "b"};

// The three experiment tasks are each a conjunction of two recurrence
// obligations; over two propositions they share one shape.
const char* kFormulaSet[] = {"[] <> a && [] <> b",  // task of robot 0
                             "[] <> b && [] <> a",  // task of robot 1, targets swapped
                             "[] <> (a && !b) && [] <> b",  // task of robot 2, disjoint targets
                             "<> a", "[] a", "a U b", "<> [] a", "[] <> a && [] <> b", "!(a U b)", "X a"};

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Verdict automaton_correctness() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    long words = 0, mismatches = 0;
    for (const char* text : kFormulaSet) {
        const Formula f = parse(text, kAB);
        const auto nba = translate(to_nnf(f));
        oracle::for_each_lasso(2, 4, 4, [&](const LassoWord& w) {
            ++words;
            if (nba_accepts_lasso(nba, w) != eval_lasso(f, w)) ++mismatches;
        });
    }
    const double t = seconds_since(t0);
    if (mismatches) v.fail(std::to_string(mismatches) + " disagreements");
    if (t >= 60) v.fail("too slow");
    std::ostringstream ss;
    ss << words << " (formula, lasso) pairs, " << mismatches << " disagreements, " << t << "s";
    v.detail = v.pass ? ss.str() : v.detail + " (" + ss.str() + ")";
    return v;
}

template <class F>
void for_each_instance(F&& visit) {
    std::mt19937 rng(2024);
    for (int i = 0; i < 50; ++i) {
        const auto inst = oracle::random_instance(rng, 4, 4, kAB, 0.25);
        for (const char* text : kFormulaSet) {
            const auto nba = translate(to_nnf(parse(text, kAB)));
            visit(inst, nba, build_product(build_cts(inst.w, inst.start), nba));
        }
    }
}

Verdict planner_equivalence() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    long feasible = 0, infeasible = 0, bad = 0;
    for_each_instance([&](const oracle::Instance& inst, const BuchiAutomaton& nba, const ProductAutomaton& pba) {
        const int expected = oracle::shortest_prefix(oracle::explicit_product(inst.w, inst.start, nba));
        try {
            const auto plan = find_plan(pba);
            ++feasible;
            if (static_cast<int>(plan.prefix.size()) - 1 != expected ||
                !nba_accepts_lasso(nba, plan.label_word(pba.cts())))
                ++bad;
        } catch (const InfeasibleTask&) {
            ++infeasible;
            if (expected >= 0) ++bad;
        }
    });
    const double t = seconds_since(t0);
    if (bad) v.fail(std::to_string(bad) + " mismatches");
    if (t >= 60) v.fail("too slow");
    std::ostringstream ss;
    ss << feasible << " feasible + " << infeasible << " infeasible instances, " << bad << " mismatches, " << t << "s";
    v.detail = v.pass ? ss.str() : v.detail + " (" + ss.str() + ")";
    return v;
}

Verdict trap_soundness() {
    Verdict v;
    long cases = 0, bad = 0, trap_states = 0;
    for_each_instance([&](const oracle::Instance& inst, const BuchiAutomaton& nba, const ProductAutomaton& pba) {
        std::set<oracle::Node> mine;
        for (int q : compute_traps(pba, compute_potential(pba)).states)
            mine.insert({pba.state(q).region, pba.state(q).buchi});
        ++cases;
        trap_states += static_cast<long>(mine.size());
        if (mine != oracle::traps(oracle::explicit_product(inst.w, inst.start, nba))) ++bad;
    });
    if (bad) v.fail(std::to_string(bad) + " unequal trap sets");
    std::ostringstream ss;
    ss << cases << " instances, " << trap_states << " trap states, " << bad << " unequal";
    v.detail = v.pass ? ss.str() : v.detail + " (" + ss.str() + ")";
    return v;
}

Verdict comm_scenario(std::map<std::uint64_t, RunResult>& comm_runs) {
    Verdict v;
    std::string details;
    for (auto seed : kSeeds) {
        const auto sc = load_scenario(kDir + "/va_comm.json", seed);
        auto run = oracle::timed_run(sc);
        const auto r = oracle::check_comm(sc, run.result, run.seconds, 30.0);
        if (!r.pass) v.fail("seed " + std::to_string(seed) + ": " + r.detail);
        details += "[seed " + std::to_string(seed) + ": " + r.detail + "] ";
        comm_runs.emplace(seed, std::move(run.result));
    }
    if (v.pass) v.detail = details;
    return v;
}

Verdict nocomm_scenario(const std::map<std::uint64_t, RunResult>& comm_runs) {
    Verdict v;
    std::string details;
    for (auto seed : kSeeds) {
        const auto res = simulate(load_scenario(kDir + "/va_nocomm.json", seed));
        const auto r = oracle::check_nocomm(res, comm_runs.at(seed));
        if (!r.pass) v.fail("seed " + std::to_string(seed) + ": " + r.detail);
        details += "[seed " + std::to_string(seed) + ": " + r.detail + "] ";
    }
    if (v.pass) v.detail = details;
    return v;
}

Verdict mic_properties() {
    Verdict v;
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> d(0.0, 2.0), g(0.0, 1.0);
    long out_of_range = 0;
    for (int i = 0; i < 10000; ++i) {
        MicParams p;
        p.g_mix = g(rng);
        const double k = kappa({d(rng), d(rng)}, p);
        if (!(k >= 0.0 && k <= 1.0)) ++out_of_range;
    }
    if (out_of_range) v.fail(std::to_string(out_of_range) + " kappa values outside [0, 1]");
    const MicParams p;
    for (double x : {0.0, p.d_s / 2, p.d_s})
        if (std::abs(gate(x, p.d_s, p.eps)) > 1e-9) v.fail("gate nonzero at d <= d_s");
    for (double x : {p.d_s + p.eps, p.d_s + 2 * p.eps, 10.0})
        if (std::abs(gate(x, p.d_s, p.eps) - 1.0) > 1e-9) v.fail("gate not one at d >= d_s + eps");
    if (std::abs(gate(p.d_s + p.eps / 2, p.d_s, p.eps) - 0.5) > 1e-9) v.fail("gate not 0.5 at midpoint");

    const auto sc = load_scenario(kDir + "/vb_hil.json");
    const auto hil = oracle::check_hil(sc, simulate(sc), 1, 23, {22, 28});
    if (!hil.pass) v.fail(hil.detail);
    if (v.pass) v.detail = "10000-point sweep in [0, 1], gate boundary values exact; " + hil.detail;
    return v;
}

Verdict dynamics() {
    Verdict v;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> pos(-5, 5), ang(-std::numbers::pi, std::numbers::pi), in(-0.35, 0.35),
        dt(1e-3, 1.0);
    double worst_pos = 0, worst_ang = 0;
    for (int i = 0; i < 1000; ++i) {
        const RobotState s{pos(rng), pos(rng), ang(rng)};
        const ControlInput u{in(rng), in(rng)};
        const double h = dt(rng);
        const auto a = step_unicycle(s, u, h), b = oracle::euler(s, u, h, 10000);
        worst_pos = std::max({worst_pos, std::abs(a.x - b.x), std::abs(a.y - b.y)});
        worst_ang = std::max(worst_ang, std::abs(wrap_angle(a.theta - b.theta)));
    }
    if (worst_pos > 1e-6 || worst_ang > 1e-6) v.fail("error above 1e-6");
    std::ostringstream ss;
    ss << "1000 triples, max error " << worst_pos << " m / " << worst_ang << " rad";
    v.detail = v.pass ? ss.str() : v.detail + " (" + ss.str() + ")";
    return v;
}

Verdict determinism() {
    Verdict v;
    for (const char* file : {"va_comm.json", "va_nocomm.json", "vb_hil.json"}) {
        const auto sc = load_scenario(kDir + "/" + file);
        if (trace_to_string(simulate(sc).trace) != trace_to_string(simulate(sc).trace))
            v.fail(std::string(file) + " traces differ");
    }
    if (v.pass) v.detail = "comm, nocomm and hil TraceLogs byte-identical across two runs";
    return v;
}

int report(int n, const char* name, const std::function<Verdict()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v.fail(std::string("exception: ") + e.what());
    }
    std::printf("criterion %d %-28s %s  %s (%.1fs)\n", n, name, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    return v.pass ? 0 : 1;
}

}  // namespace

int main() {
    std::map<std::uint64_t, RunResult> comm_runs;
    int failures = 0;
    failures += report(1, "automaton-correctness", automaton_correctness);
    failures += report(2, "planner-oracle-equivalence", planner_equivalence);
    failures += report(3, "trap-soundness", trap_soundness);
    failures += report(4, "comm-scenario", [&] { return comm_scenario(comm_runs); });
    failures += report(5, "nocomm-scenario", [&] { return nocomm_scenario(comm_runs); });
    failures += report(6, "mic-properties", mic_properties);
    failures += report(7, "dynamics", dynamics);
    failures += report(8, "determinism", determinism);
    std::printf("%d of 8 criteria passed\n", 8 - failures);
    return failures;
}
