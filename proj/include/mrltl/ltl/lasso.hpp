#pragma once

// Ultimately periodic words stem.loop^w and direct LTL evaluation over them.

#include <stdexcept>
#include <vector>

#include "mrltl/ltl/formula.hpp"

namespace mrltl {

struct LassoWord {
    std::vector<LabelSet> stem;
    std::vector<LabelSet> loop;  // nonempty

    std::size_t positions() const noexcept { return stem.size() + loop.size(); }

    /// Successor of a position in the folded word.
    std::size_t successor(std::size_t i) const noexcept {
        return i + 1 < positions() ? i + 1 : stem.size();
    }

    LabelSet at(std::size_t i) const { return i < stem.size() ? stem[i] : loop[i - stem.size()]; }

    void validate() const {
        if (loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
    }
};

namespace detail {

// Truth of `f` at every folded position. Until is a least fixpoint, Release a
// greatest fixpoint, both iterated around the loop until stable.
inline std::vector<char> eval_positions(const Formula& f, const LassoWord& w) {
    const std::size_t n = w.positions();
    std::vector<char> out(n, 0);
    switch (f.op()) {
        case Op::True: std::fill(out.begin(), out.end(), 1); break;
        case Op::False: break;
        case Op::Prop:
            for (std::size_t i = 0; i < n; ++i) out[i] = (w.at(i) & prop_bit(f.prop_id())) != 0;
            break;
        case Op::Not: {
            auto a = eval_positions(f.lhs(), w);
            for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
            break;
        }
        case Op::And:
        case Op::Or: {
            auto a = eval_positions(f.lhs(), w);
            auto b = eval_positions(f.rhs(), w);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = f.op() == Op::And ? (a[i] && b[i]) : (a[i] || b[i]);
            break;
        }
        case Op::Next: {
            auto a = eval_positions(f.lhs(), w);
            for (std::size_t i = 0; i < n; ++i) out[i] = a[w.successor(i)];
            break;
        }
        case Op::Until:
        case Op::Eventually: {
            const bool ev = f.op() == Op::Eventually;
            auto a = ev ? std::vector<char>(n, 1) : eval_positions(f.lhs(), w);
            auto b = eval_positions(ev ? f.lhs() : f.rhs(), w);
            for (bool changed = true; changed;) {
                changed = false;
                for (std::size_t k = n; k-- > 0;) {
                    const char v = b[k] || (a[k] && out[w.successor(k)]);
                    if (v != out[k]) {
                        out[k] = v;
                        changed = true;
                    }
                }
            }
            break;
        }
        case Op::Release:
        case Op::Always: {
            const bool alw = f.op() == Op::Always;
            auto a = alw ? std::vector<char>(n, 0) : eval_positions(f.lhs(), w);
            auto b = eval_positions(alw ? f.lhs() : f.rhs(), w);
            std::fill(out.begin(), out.end(), 1);
            for (bool changed = true; changed;) {
                changed = false;
                for (std::size_t k = n; k-- > 0;) {
                    const char v = b[k] && (a[k] || out[w.successor(k)]);
                    if (v != out[k]) {
                        out[k] = v;
                        changed = true;
                    }
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace detail

/// Truth of `f` at position 0 of `w`.
inline bool eval_lasso(const Formula& f, const LassoWord& w) {
    w.validate();
    return detail::eval_positions(f, w)[0] != 0;
}

}  // namespace mrltl
