#pragma once

// Product of a region transition system with a Buchi automaton, accepting
// prefix-suffix plan synthesis, hop-count potential and trap states.
//
// A product state (r, s) moves to (r', s') when r -> r' in the CTS and
// s' is in delta(s, L(r')): the label of the region being entered is read.

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrltl/graph.hpp"
#include "mrltl/ltl/buchi.hpp"
#include "mrltl/ltl/lasso.hpp"
#include "mrltl/workspace.hpp"

namespace mrltl {

struct ProductState {
    RegionId region = 0;
    int buchi = 0;
    friend bool operator==(const ProductState&, const ProductState&) = default;
    friend auto operator<=>(const ProductState&, const ProductState&) = default;
};

class InfeasibleTask : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transitions are materialized over every (region, buchi) pair so that the
/// potential can be queried from states the initial run never reaches; the
/// `reachable` mask records the pruned automaton proper.
class ProductAutomaton {
public:
    ProductAutomaton() = default;

    ProductAutomaton(const Cts& cts, BuchiAutomaton nba) : cts_(cts), nba_(std::move(nba)) {
        if (nba_.initial.empty()) throw std::invalid_argument("automaton has no initial state");
        const int n = size();
        succ_.assign(static_cast<std::size_t>(n), {});
        for (RegionId r = 1; r <= cts_.num_regions; ++r)
            for (int s = 0; s < nba_.num_states(); ++s) {
                auto& out = succ_[static_cast<std::size_t>(index(r, s))];
                for (RegionId r2 : cts_.succ(r))
                    for (int s2 : nba_.delta(s, cts_.label(r2))) out.push_back(index(r2, s2));
                std::sort(out.begin(), out.end());
            }
        for (int s0 : nba_.initial) initial_.push_back(index(cts_.initial, s0));
        std::sort(initial_.begin(), initial_.end());
        initial_.erase(std::unique(initial_.begin(), initial_.end()), initial_.end());
        const auto dist = bfs_distances(succ_, initial_);
        reachable_.resize(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) reachable_[static_cast<std::size_t>(q)] = dist[q] != kUnreachable;
    }

    const Cts& cts() const noexcept { return cts_; }
    const BuchiAutomaton& nba() const noexcept { return nba_; }

    /// Number of (region, buchi) pairs, reachable or not.
    int size() const noexcept { return cts_.num_regions * nba_.num_states(); }
    int index(RegionId r, int s) const noexcept { return (r - 1) * nba_.num_states() + s; }
    int index(ProductState p) const noexcept { return index(p.region, p.buchi); }
    ProductState state(int q) const noexcept {
        return {q / nba_.num_states() + 1, q % nba_.num_states()};
    }

    const Adjacency& successors() const noexcept { return succ_; }
    const std::vector<int>& succ(int q) const { return succ_.at(static_cast<std::size_t>(q)); }
    const std::vector<int>& initial() const noexcept { return initial_; }
    bool is_accepting(int q) const { return nba_.is_accepting(state(q).buchi); }
    bool is_reachable(int q) const { return reachable_.at(static_cast<std::size_t>(q)) != 0; }
    LabelSet label(int q) const { return cts_.label(state(q).region); }

    std::vector<int> reachable_states() const {
        std::vector<int> out;
        for (int q = 0; q < size(); ++q)
            if (reachable_[static_cast<std::size_t>(q)]) out.push_back(q);
        return out;
    }
    std::size_t num_reachable() const {
        return static_cast<std::size_t>(std::count(reachable_.begin(), reachable_.end(), 1));
    }

private:
    Cts cts_;
    BuchiAutomaton nba_;
    Adjacency succ_;
    std::vector<int> initial_;
    std::vector<char> reachable_;
};

inline ProductAutomaton build_product(const Cts& cts, const BuchiAutomaton& nba) {
    return ProductAutomaton(cts, nba);
}

/// Hop distance to the nearest self-reachable accepting state, per product
/// state index; kUnreachable stands for infinity.
struct PotentialTable {
    std::vector<int> value;
    int num_buchi = 0;

    bool finite(int q) const { return value.at(static_cast<std::size_t>(q)) != kUnreachable; }
    int at(int q) const { return value.at(static_cast<std::size_t>(q)); }
    int at(RegionId r, int s) const { return at((r - 1) * num_buchi + s); }

    /// Minimum over a set of buchi states; an empty set is infinite.
    int at(RegionId r, const std::vector<int>& buchi_set) const {
        int best = kUnreachable;
        for (int s : buchi_set) best = std::min(best, at(r, s));
        return best;
    }
};

/// Accepting states lying on a cycle of length >= 1.
inline std::vector<int> self_reachable_accepting(const ProductAutomaton& p) {
    const auto cyc = on_cycle(p.successors());
    std::vector<int> out;
    for (int q = 0; q < p.size(); ++q)
        if (cyc[static_cast<std::size_t>(q)] && p.is_accepting(q)) out.push_back(q);
    return out;
}

inline PotentialTable compute_potential(const ProductAutomaton& p) {
    return {bfs_distances(reverse(p.successors()), self_reachable_accepting(p)), p.nba().num_states()};
}

/// Reachable product states with infinite potential.
struct TrapSet {
    std::vector<int> states;  // sorted product indices
    bool contains(int q) const { return std::binary_search(states.begin(), states.end(), q); }
};

inline TrapSet compute_traps(const ProductAutomaton& p, const PotentialTable& v) {
    TrapSet t;
    for (int q : p.reachable_states())
        if (!v.finite(q)) t.states.push_back(q);
    return t;
}

/// One-step image of a buchi state set under an observation.
inline std::vector<int> track_buchi(const BuchiAutomaton& nba, const std::vector<int>& current,
                                    LabelSet observed) {
    return step_states(nba, current, observed);
}

/// Free regions whose entry from buchi set `current` leaves no accepting
/// continuation.
inline std::vector<RegionId> trap_regions(const ProductAutomaton& p, const PotentialTable& v,
                                          const std::vector<int>& current) {
    std::vector<RegionId> out;
    for (RegionId r = 1; r <= p.cts().num_regions; ++r) {
        if (p.cts().succ(r).empty()) continue;  // static obstacle
        const auto next = track_buchi(p.nba(), current, p.cts().label(r));
        if (v.at(r, next) == kUnreachable) out.push_back(r);
    }
    return out;
}

/// Accepting lasso p0..pk (p_{k+1}..p_n p_k)^w. `suffix` ends with the anchor
/// p_k, so a dwell cycle is the single element {p_k}.
struct Plan {
    std::vector<ProductState> prefix;
    std::vector<ProductState> suffix;

    const ProductState& anchor() const { return prefix.back(); }
    std::vector<RegionId> prefix_regions() const { return project(prefix); }
    std::vector<RegionId> suffix_regions() const { return project(suffix); }

    /// Label word read along the run (initial region's label is not read).
    LassoWord label_word(const Cts& cts) const {
        LassoWord w;
        for (std::size_t i = 1; i < prefix.size(); ++i) w.stem.push_back(cts.label(prefix[i].region));
        for (const auto& q : suffix) w.loop.push_back(cts.label(q.region));
        return w;
    }

    friend bool operator==(const Plan&, const Plan&) = default;

private:
    static std::vector<RegionId> project(const std::vector<ProductState>& xs) {
        std::vector<RegionId> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(x.region);
        return out;
    }
};

namespace detail {

// Lexicographically smallest shortest path from the best of `sources` to
// `target`, given distances-to-target `to`. Includes both endpoints.
inline std::vector<int> greedy_path(const Adjacency& adj, const std::vector<int>& to, int from, int len) {
    std::vector<int> path{from};
    int v = from;
    for (int remaining = len; remaining > 0; --remaining) {
        for (int w : adj[static_cast<std::size_t>(v)])  // sorted ascending
            if (to[static_cast<std::size_t>(w)] == remaining - 1) {
                v = w;
                break;
            }
        path.push_back(v);
    }
    return path;
}

}  // namespace detail

/// Shortest prefix to a self-reachable accepting anchor, then shortest cycle
/// through it; remaining ties go to the lexicographically smallest
/// (region, buchi) sequence. `start` overrides the product's initial states.
inline Plan find_plan(const ProductAutomaton& p, const std::vector<int>* start = nullptr) {
    const auto& adj = p.successors();
    const auto& sources = start ? *start : p.initial();
    if (sources.empty()) throw InfeasibleTask("no initial product state");
    const auto from_start = bfs_distances(adj, sources);
    const auto anchors = self_reachable_accepting(p);
    int best_prefix = kUnreachable;
    for (int a : anchors) best_prefix = std::min(best_prefix, from_start[static_cast<std::size_t>(a)]);
    if (best_prefix == kUnreachable) throw InfeasibleTask("no accepting run exists");
    const Adjacency rev = reverse(adj);

    std::vector<int> best_seq;
    int best_cycle = kUnreachable;
    Plan best;
    for (int a : anchors) {
        if (from_start[static_cast<std::size_t>(a)] != best_prefix) continue;
        const auto to_a = bfs_distances(rev, {a});
        int cycle = kUnreachable;
        for (int w : adj[static_cast<std::size_t>(a)])
            if (to_a[static_cast<std::size_t>(w)] != kUnreachable)
                cycle = std::min(cycle, to_a[static_cast<std::size_t>(w)] + 1);
        if (cycle > best_cycle) continue;
        int src = -1;
        for (int s : sources)
            if (to_a[static_cast<std::size_t>(s)] == best_prefix && (src < 0 || s < src)) src = s;
        const auto pre = detail::greedy_path(adj, to_a, src, best_prefix);
        int first = -1;
        for (int w : adj[static_cast<std::size_t>(a)])
            if (to_a[static_cast<std::size_t>(w)] == cycle - 1) {
                first = w;
                break;
            }
        const auto loop = detail::greedy_path(adj, to_a, first, cycle - 1);
        std::vector<int> seq = pre;
        seq.insert(seq.end(), loop.begin(), loop.end());
        if (cycle == best_cycle && !(seq < best_seq)) continue;
        best_cycle = cycle;
        best_seq = seq;
        best.prefix.clear();
        best.suffix.clear();
        for (int q : pre) best.prefix.push_back(p.state(q));
        for (int q : loop) best.suffix.push_back(p.state(q));
    }
    return best;
}

/// Plan restricted to start at region `r` from any state in `buchi_set`.
inline Plan find_plan_from(const ProductAutomaton& p, RegionId r, const std::vector<int>& buchi_set) {
    std::vector<int> start;
    for (int s : buchi_set) start.push_back(p.index(r, s));
    std::sort(start.begin(), start.end());
    return find_plan(p, &start);
}

/// Throws std::invalid_argument unless `plan` is a well-formed accepting lasso
/// in `p`.
inline void validate_plan(const ProductAutomaton& p, const Plan& plan) {
    if (plan.prefix.empty() || plan.suffix.empty()) throw std::invalid_argument("plan has an empty part");
    auto check_state = [&](const ProductState& q) {
        if (q.region < 1 || q.region > p.cts().num_regions || q.buchi < 0 || q.buchi >= p.nba().num_states())
            throw std::invalid_argument("plan state out of range");
    };
    auto check_edge = [&](const ProductState& a, const ProductState& b) {
        check_state(a);
        check_state(b);
        const auto& s = p.succ(p.index(a));
        if (!std::binary_search(s.begin(), s.end(), p.index(b)))
            throw std::invalid_argument("plan step R" + std::to_string(a.region) + ":" +
                                        std::to_string(a.buchi) + " -> R" + std::to_string(b.region) +
                                        ":" + std::to_string(b.buchi) + " is not a product transition");
    };
    for (std::size_t i = 0; i + 1 < plan.prefix.size(); ++i) check_edge(plan.prefix[i], plan.prefix[i + 1]);
    check_edge(plan.anchor(), plan.suffix.front());
    for (std::size_t i = 0; i + 1 < plan.suffix.size(); ++i) check_edge(plan.suffix[i], plan.suffix[i + 1]);
    if (!(plan.suffix.back() == plan.anchor())) throw std::invalid_argument("suffix does not close at anchor");
    if (!p.is_accepting(p.index(plan.anchor()))) throw std::invalid_argument("anchor is not accepting");
}

}  // namespace mrltl
