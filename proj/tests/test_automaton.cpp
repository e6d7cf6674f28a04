#include <gtest/gtest.h>

#include <cmath>

#include "mrltl/ltl/buchi.hpp"
#include "mrltl/ltl/lasso.hpp"
#include "mrltl/ltl/translate.hpp"
#include "support/lasso_words.hpp"

using namespace mrltl;

namespace {

const PropositionTable kAB{"a", "b"};
constexpr LabelSet A = 1, B = 2, NONE = 0;

BuchiAutomaton nba_of(const char* text) { return translate(to_nnf(parse(text, kAB)), &kAB); }

}  // namespace

TEST(EvalLasso, AlwaysEventuallyOnConstantWord) {
    EXPECT_TRUE(eval_lasso(parse("[] <> a", kAB), LassoWord{{}, {A}}));
}

TEST(EvalLasso, EventuallyNever) {
    EXPECT_FALSE(eval_lasso(parse("<> a", kAB), LassoWord{{NONE}, {NONE}}));
}

TEST(EvalLasso, UntilDirect) {
    EXPECT_TRUE(eval_lasso(parse("a U b", kAB), LassoWord{{A, A, B}, {NONE}}));
    EXPECT_FALSE(eval_lasso(parse("a U b", kAB), LassoWord{{A, NONE, B}, {NONE}}));
}

TEST(EvalLasso, NextWrapsIntoLoop) {
    EXPECT_TRUE(eval_lasso(parse("X X a", kAB), LassoWord{{NONE}, {NONE, A}}));
    EXPECT_FALSE(eval_lasso(parse("X X X a", kAB), LassoWord{{NONE}, {NONE, A}}));
}

TEST(EvalLasso, RejectsEmptyLoop) {
    EXPECT_THROW(eval_lasso(Formula::truth(), LassoWord{{A}, {}}), std::invalid_argument);
}

TEST(NbaAcceptsLasso, TrueSelfLoop) {
    BuchiAutomaton nba;
    nba.add_state(true);
    nba.initial = {0};
    nba.add_edge(0, 0, Guard{});
    EXPECT_TRUE(nba_accepts_lasso(nba, LassoWord{{A, B}, {NONE, A}}));
    EXPECT_TRUE(nba_accepts_lasso(nba, LassoWord{{}, {B}}));
}

TEST(NbaAcceptsLasso, NoAcceptingStates) {
    BuchiAutomaton nba;
    nba.add_state(false);
    nba.initial = {0};
    nba.add_edge(0, 0, Guard{});
    EXPECT_FALSE(nba_accepts_lasso(nba, LassoWord{{}, {A}}));
}

TEST(NbaAcceptsLasso, AcceptingStateOnlyInStem) {
    // 0 -a-> 1 (accepting) -true-> 2 -true-> 2
    BuchiAutomaton nba;
    nba.add_state(false);
    nba.add_state(true);
    nba.add_state(false);
    nba.initial = {0};
    nba.add_edge(0, 1, Guard{A, 0});
    nba.add_edge(1, 2, Guard{});
    nba.add_edge(2, 2, Guard{});
    EXPECT_FALSE(nba_accepts_lasso(nba, LassoWord{{A}, {NONE}}));
}

TEST(Translate, Eventually) {
    const auto nba = nba_of("<> a");
    EXPECT_TRUE(nba.well_formed());
    EXPECT_TRUE(nba_accepts_lasso(nba, LassoWord{{NONE, NONE, A}, {NONE}}));
    EXPECT_FALSE(nba_accepts_lasso(nba, LassoWord{{NONE}, {NONE}}));
    EXPECT_TRUE(nba_accepts_lasso(nba, LassoWord{{A}, {NONE}}));
}

TEST(Translate, AlwaysEventually) {
    const auto nba = nba_of("[] <> a");
    EXPECT_TRUE(nba_accepts_lasso(nba, LassoWord{{}, {A}}));
    EXPECT_FALSE(nba_accepts_lasso(nba, LassoWord{{A, NONE}, {NONE}}));
}

TEST(Translate, TrueAcceptsEverything) {
    const auto nba = translate(Formula::truth());
    oracle::for_each_lasso(2, 2, 2, [&](const LassoWord& w) {
        EXPECT_TRUE(nba_accepts_lasso(nba, w));
    });
}

TEST(Translate, EventuallyReachesAcceptingSinkDirectly) {
    // Reading `a` from the initial state lands on an accepting state with a
    // true self-loop; planners rely on this for minimal prefixes.
    const auto nba = nba_of("<> a");
    ASSERT_EQ(nba.initial.size(), 1u);
    const auto succ = nba.delta(nba.initial[0], A);
    bool found = false;
    for (int s : succ) {
        if (!nba.is_accepting(s)) continue;
        for (const auto& e : nba.edges[s]) found = found || (e.target == s && e.guard.is_true());
    }
    EXPECT_TRUE(found);
}

TEST(Translate, OracleAgreementOnSmallWords) {
    const char* formulas[] = {"a",          "!a",         "X a",          "a U b",
                              "!(a U b)",   "<> a",       "[] a",         "<> [] a",
                              "[] <> a",    "[] (!a || b)"};
    for (const char* text : formulas) {
        const Formula f = parse(text, kAB);
        const auto nba = translate(to_nnf(f));
        oracle::for_each_lasso(2, 3, 3, [&](const LassoWord& w) {
            ASSERT_EQ(nba_accepts_lasso(nba, w), eval_lasso(f, w)) << text;
        });
    }
}

TEST(Translate, MixedOperatorsAgreeWithOracle) {
    const char* formulas[] = {"(a U b) || [] !b", "X (a U X b)", "[] (a || X b)",
                              "!(<> a && [] <> b)", "(a U b) U (b U a)", "[] (!a || <> b)"};
    for (const char* text : formulas) {
        const Formula f = parse(text, kAB);
        const auto nba = translate(to_nnf(f));
        oracle::for_each_lasso(2, 2, 3, [&](const LassoWord& w) {
            ASSERT_EQ(nba_accepts_lasso(nba, w), eval_lasso(f, w)) << text;
        });
    }
}

TEST(Translate, StateCountWithinClosureBound) {
    for (const char* text : {"[] <> a && [] <> b", "<> [] a", "a U (b U a)", "X X X a"}) {
        const Formula f = parse(text, kAB);
        const auto nba = translate(to_nnf(f));
        const double bound = std::pow(2.0, 2.0 * static_cast<double>(closure_size(f)));
        EXPECT_LE(static_cast<double>(nba.num_states()), bound) << text;
        EXPECT_TRUE(nba.well_formed());
    }
}

TEST(Translate, GuardsOnlyMentionDeclaredPropositions) {
    const auto nba = nba_of("[] <> a && [] <> b");
    for (const auto& es : nba.edges)
        for (const auto& e : es) EXPECT_EQ((e.guard.pos | e.guard.neg) & ~LabelSet{3}, 0u);
}

TEST(Delta, MatchesGuardEvaluation) {
    const auto nba = nba_of("[] <> a && [] <> b");
    for (int s = 0; s < nba.num_states(); ++s) {
        for (LabelSet sigma = 0; sigma < 4; ++sigma) {
            std::vector<int> expected;
            for (const auto& e : nba.edges[s])
                if (e.guard.eval(sigma)) expected.push_back(e.target);
            std::sort(expected.begin(), expected.end());
            expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
            EXPECT_EQ(nba.delta(s, sigma), expected);
        }
    }
}
