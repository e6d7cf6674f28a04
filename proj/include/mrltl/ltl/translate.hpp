#pragma once

// LTL -> NBA by tableau node expansion.
//
// A tableau state is the set of obligations (NNF formulas) the rest of the
// word must satisfy. Expanding a state splits its obligations into fully
// expanded covers; each cover yields one edge labelled with the cover's
// literals, leading to the state made of its X-obligations. An edge belongs to
// the acceptance set of an until u = a U b unless the cover postponed u (u in
// the cover without b). The resulting generalized automaton is degeneralized
// with a level counter; level k (= number of untils) marks accepting states.

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrltl/ltl/buchi.hpp"
#include "mrltl/ltl/formula.hpp"

namespace mrltl {

namespace detail {

class Tableau {
public:
    explicit Tableau(const Formula& nnf_root) : root_(intern(nnf_root)) {
        for (int id = 0; id < static_cast<int>(items_.size()); ++id)
            if (items_[id].op() == Op::Until) untils_.push_back(id);
    }

    BuchiAutomaton build(const PropositionTable* props) {
        const int k = static_cast<int>(untils_.size());
        BuchiAutomaton nba;
        std::map<std::pair<std::vector<int>, int>, int> ids;
        std::vector<std::pair<std::vector<int>, int>> queue;

        auto state_of = [&](const std::vector<int>& obligations, int level) {
            auto key = std::make_pair(obligations, level);
            if (auto it = ids.find(key); it != ids.end()) return it->second;
            const int id = nba.add_state(level == k, describe(obligations, level, props));
            ids.emplace(key, id);
            queue.push_back(key);
            return id;
        };

        nba.initial.push_back(state_of({root_}, 0));
        std::map<std::vector<int>, std::vector<Cover>> cover_cache;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto [obligations, level] = queue[head];
            const int from = ids.at(queue[head]);
            auto it = cover_cache.find(obligations);
            if (it == cover_cache.end())
                it = cover_cache.emplace(obligations, expand(obligations)).first;
            for (const Cover& c : it->second) {
                int next_level = level == k ? 0 : level;
                while (next_level < k && c.accepts[next_level]) ++next_level;
                const int to = state_of(c.next, next_level);
                bool duplicate = false;
                for (const auto& e : nba.edges[from])
                    duplicate = duplicate || (e.target == to && e.guard == c.guard);
                if (!duplicate) nba.add_edge(from, to, c.guard);
            }
        }
        return nba;
    }

    std::size_t closure_size() const noexcept { return items_.size(); }

private:
    struct Cover {
        Guard guard;
        std::vector<int> next;
        std::vector<char> accepts;  // per until
    };

    struct Node {
        std::set<int> fresh, old, next;
    };

    int intern(const Formula& f) {
        std::string key = structural_key(f);
        if (auto it = index_.find(key); it != index_.end()) return it->second;
        if (f.is_unary()) intern(f.lhs());
        if (f.is_binary()) {
            intern(f.lhs());
            intern(f.rhs());
        }
        const int id = static_cast<int>(items_.size());
        items_.push_back(f);
        index_.emplace(std::move(key), id);
        return id;
    }

    int id_of(const Formula& f) const { return index_.at(structural_key(f)); }

    // Literal id of the complementary literal, or -1 when it never occurs.
    int complement(int id) const {
        const Formula& f = items_[id];
        const std::string key =
            f.op() == Op::Prop ? "!" + structural_key(f) : structural_key(f.lhs());
        auto it = index_.find(key);
        return it == index_.end() ? -1 : it->second;
    }

    std::vector<Cover> expand(const std::vector<int>& obligations) const {
        std::vector<Cover> covers;
        std::vector<Node> work{Node{{obligations.begin(), obligations.end()}, {}, {}}};
        while (!work.empty()) {
            Node n = std::move(work.back());
            work.pop_back();
            if (n.fresh.empty()) {
                covers.push_back(finish(n));
                continue;
            }
            const int eta = *n.fresh.begin();
            n.fresh.erase(n.fresh.begin());
            if (n.old.count(eta)) {
                work.push_back(std::move(n));
                continue;
            }
            const Formula& f = items_[eta];
            auto add_fresh = [](Node& node, int id) {
                if (!node.old.count(id)) node.fresh.insert(id);
            };
            switch (f.op()) {
                case Op::False: break;
                case Op::True:
                    n.old.insert(eta);
                    work.push_back(std::move(n));
                    break;
                case Op::Prop:
                case Op::Not: {
                    const int neg = complement(eta);
                    if (neg >= 0 && n.old.count(neg)) break;
                    n.old.insert(eta);
                    work.push_back(std::move(n));
                    break;
                }
                case Op::And:
                    n.old.insert(eta);
                    add_fresh(n, id_of(f.lhs()));
                    add_fresh(n, id_of(f.rhs()));
                    work.push_back(std::move(n));
                    break;
                case Op::Next:
                    n.old.insert(eta);
                    n.next.insert(id_of(f.lhs()));
                    work.push_back(std::move(n));
                    break;
                case Op::Or: {
                    n.old.insert(eta);
                    Node other = n;
                    add_fresh(n, id_of(f.lhs()));
                    add_fresh(other, id_of(f.rhs()));
                    work.push_back(std::move(other));
                    work.push_back(std::move(n));
                    break;
                }
                case Op::Until: {
                    // a U b  ==  b || (a && X(a U b))
                    n.old.insert(eta);
                    Node now = n;
                    add_fresh(now, id_of(f.rhs()));
                    add_fresh(n, id_of(f.lhs()));
                    n.next.insert(eta);
                    work.push_back(std::move(n));
                    work.push_back(std::move(now));
                    break;
                }
                case Op::Release: {
                    // a R b  ==  b && (a || X(a R b))
                    n.old.insert(eta);
                    Node now = n;
                    add_fresh(now, id_of(f.lhs()));
                    add_fresh(now, id_of(f.rhs()));
                    add_fresh(n, id_of(f.rhs()));
                    n.next.insert(eta);
                    work.push_back(std::move(n));
                    work.push_back(std::move(now));
                    break;
                }
                case Op::Eventually:
                case Op::Always:
                    throw std::logic_error("tableau expects NNF input");
            }
        }
        return covers;
    }

    Cover finish(const Node& n) const {
        Cover c;
        for (int id : n.old) {
            const Formula& f = items_[id];
            if (f.op() == Op::Prop) c.guard.pos |= prop_bit(f.prop_id());
            if (f.op() == Op::Not) c.guard.neg |= prop_bit(f.lhs().prop_id());
        }
        c.next.assign(n.next.begin(), n.next.end());
        for (int u : untils_) {
            const bool fulfilled = !n.old.count(u) || n.old.count(id_of(items_[u].rhs()));
            c.accepts.push_back(fulfilled ? 1 : 0);
        }
        return c;
    }

    std::string describe(const std::vector<int>& obligations, int level,
                         const PropositionTable* props) const {
        std::string out = "{";
        for (std::size_t i = 0; i < obligations.size(); ++i) {
            if (i) out += ", ";
            out += props ? to_string(items_[obligations[i]], *props)
                         : structural_key(items_[obligations[i]]);
        }
        return out + "}#" + std::to_string(level);
    }

    std::vector<Formula> items_;
    std::unordered_map<std::string, int> index_;
    std::vector<int> untils_;
    int root_;
};

}  // namespace detail

/// Translates `f` into an NBA accepting exactly its models. Inputs that are
/// not yet in NNF are normalized first. `props` only affects state names.
inline BuchiAutomaton translate(const Formula& f, const PropositionTable* props = nullptr) {
    const Formula nnf = is_nnf(f) ? f : to_nnf(f);
    return detail::Tableau(nnf).build(props);
}

/// Number of distinct subformulas of the NNF of `f`.
inline std::size_t closure_size(const Formula& f) {
    return detail::Tableau(is_nnf(f) ? f : to_nnf(f)).closure_size();
}

}  // namespace mrltl
