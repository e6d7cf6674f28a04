#pragma once

// Nondeterministic Buchi automata with conjunctive literal guards.

#include <algorithm>
#include <string>
#include <vector>

#include "mrltl/graph.hpp"
#include "mrltl/ltl/formula.hpp"
#include "mrltl/ltl/lasso.hpp"

namespace mrltl {

/// Conjunction of literals: every `pos` proposition holds, no `neg` one does.
/// The empty guard is `true`. A disjunctive guard is expressed as parallel
/// edges.
struct Guard {
    LabelSet pos = 0;
    LabelSet neg = 0;

    bool eval(LabelSet sigma) const noexcept {
        return (sigma & pos) == pos && (sigma & neg) == 0;
    }
    bool is_true() const noexcept { return pos == 0 && neg == 0; }

    friend bool operator==(const Guard&, const Guard&) = default;
};

inline std::string to_string(const Guard& g, const PropositionTable& props) {
    if (g.is_true()) return "true";
    std::string out;
    for (std::size_t i = 0; i < kMaxPropositions; ++i) {
        const LabelSet bit = prop_bit(static_cast<int>(i));
        if (!(g.pos & bit) && !(g.neg & bit)) continue;
        if (!out.empty()) out += " && ";
        if (g.neg & bit) out += "!";
        out += i < props.size() ? props.name(static_cast<int>(i)) : "p" + std::to_string(i);
    }
    return out;
}

struct BuchiEdge {
    int target = 0;
    Guard guard;
};

struct BuchiAutomaton {
    std::vector<std::vector<BuchiEdge>> edges;  // per source state
    std::vector<int> initial;
    std::vector<char> accepting;
    std::vector<std::string> names;  // diagnostic only

    int num_states() const noexcept { return static_cast<int>(edges.size()); }

    int add_state(bool is_accepting, std::string name = {}) {
        edges.emplace_back();
        accepting.push_back(is_accepting ? 1 : 0);
        names.push_back(std::move(name));
        return num_states() - 1;
    }

    void add_edge(int from, int to, Guard g) { edges.at(from).push_back({to, g}); }

    bool is_accepting(int s) const { return accepting.at(s) != 0; }

    /// delta(s, sigma): sorted successor states.
    std::vector<int> delta(int s, LabelSet sigma) const {
        std::vector<int> out;
        for (const auto& e : edges.at(s))
            if (e.guard.eval(sigma)) out.push_back(e.target);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::size_t num_edges() const {
        std::size_t n = 0;
        for (const auto& es : edges) n += es.size();
        return n;
    }

    /// Every edge endpoint and initial state is a valid state id.
    bool well_formed() const {
        const int n = num_states();
        if (static_cast<int>(accepting.size()) != n) return false;
        for (int s : initial)
            if (s < 0 || s >= n) return false;
        for (const auto& es : edges)
            for (const auto& e : es)
                if (e.target < 0 || e.target >= n) return false;
        return true;
    }
};

/// One-step image of a state set under an observed label set.
inline std::vector<int> step_states(const BuchiAutomaton& nba, const std::vector<int>& current,
                                    LabelSet observed) {
    std::vector<int> out;
    for (int s : current)
        for (const auto& e : nba.edges.at(s))
            if (e.guard.eval(observed)) out.push_back(e.target);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// True iff some run of `nba` over `w` visits an accepting state infinitely
/// often. Searches the (state x folded position) graph for a reachable
/// accepting vertex on a cycle; such cycles necessarily lie in the loop part.
inline bool nba_accepts_lasso(const BuchiAutomaton& nba, const LassoWord& w) {
    w.validate();
    const int positions = static_cast<int>(w.positions());
    const int n = nba.num_states() * positions;
    auto vid = [positions](int s, int i) { return s * positions + i; };

    Adjacency adj(static_cast<std::size_t>(n));
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> work;
    for (int s : nba.initial) {
        const int v = vid(s, 0);
        if (!seen[v]) {
            seen[v] = 1;
            work.push_back(v);
        }
    }
    while (!work.empty()) {
        const int v = work.back();
        work.pop_back();
        const int s = v / positions, i = v % positions;
        const LabelSet sigma = w.at(static_cast<std::size_t>(i));
        const int next_i = static_cast<int>(w.successor(static_cast<std::size_t>(i)));
        for (const auto& e : nba.edges[s]) {
            if (!e.guard.eval(sigma)) continue;
            const int u = vid(e.target, next_i);
            adj[v].push_back(u);
            if (!seen[u]) {
                seen[u] = 1;
                work.push_back(u);
            }
        }
    }
    const auto cyc = on_cycle(adj);
    for (int v = 0; v < n; ++v)
        if (seen[v] && cyc[v] && nba.is_accepting(v / positions)) return true;
    return false;
}

}  // namespace mrltl
