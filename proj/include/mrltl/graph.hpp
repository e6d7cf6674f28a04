#pragma once

// Small adjacency-list graph helpers shared by the automaton and planner code.

#include <algorithm>
#include <deque>
#include <limits>
#include <vector>

namespace mrltl {

using Adjacency = std::vector<std::vector<int>>;

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Strongly connected component id per vertex (iterative Tarjan).
inline std::vector<int> strongly_connected_components(const Adjacency& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0, next_comp = 0;

    struct Frame {
        int v;
        std::size_t edge;
    };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& fr = call.back();
            const int v = fr.v;
            if (fr.edge < adj[v].size()) {
                const int w = adj[v][fr.edge++];
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                for (;;) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = next_comp;
                    if (w == v) break;
                }
                ++next_comp;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    return comp;
}

/// Vertices lying on some cycle of length >= 1.
inline std::vector<char> on_cycle(const Adjacency& adj) {
    const auto comp = strongly_connected_components(adj);
    std::vector<int> comp_size(adj.size(), 0);
    for (int c : comp) ++comp_size[c];
    std::vector<char> out(adj.size(), 0);
    for (std::size_t v = 0; v < adj.size(); ++v) {
        if (comp_size[comp[v]] > 1) out[v] = 1;
        for (int w : adj[v])
            if (w == static_cast<int>(v)) out[v] = 1;
    }
    return out;
}

inline Adjacency reverse(const Adjacency& adj) {
    Adjacency rev(adj.size());
    for (std::size_t v = 0; v < adj.size(); ++v)
        for (int w : adj[v]) rev[w].push_back(static_cast<int>(v));
    return rev;
}

/// Hop distance from the nearest source; kUnreachable otherwise.
inline std::vector<int> bfs_distances(const Adjacency& adj, const std::vector<int>& sources) {
    std::vector<int> dist(adj.size(), kUnreachable);
    std::deque<int> queue;
    for (int s : sources) {
        if (dist[s] == 0) continue;
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : adj[v]) {
            if (dist[w] != kUnreachable) continue;
            dist[w] = dist[v] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

}  // namespace mrltl
