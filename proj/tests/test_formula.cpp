#include <gtest/gtest.h>

#include <random>

#include "mrltl/ltl/formula.hpp"
#include "mrltl/ltl/lasso.hpp"

using namespace mrltl;

namespace {

const PropositionTable kAB{"a", "b", "c"};

Formula P(const char* name) { return Formula::prop(kAB.find(name)); }

}  // namespace

TEST(Parse, SurveillanceTask) {
    PropositionTable props{"R8", "R20"};
    const Formula f = parse("[] <> R8 && [] <> R20", props);
    const Formula expected =
        Formula::conj(Formula::always(Formula::eventually(Formula::prop(0))),
                      Formula::always(Formula::eventually(Formula::prop(1))));
    EXPECT_EQ(f, expected);
}

TEST(Parse, TrueLiteral) { EXPECT_EQ(parse("true", kAB), Formula::truth()); }

TEST(Parse, UntilIsRightAssociative) {
    EXPECT_EQ(parse("a U b U c", kAB), Formula::until(P("a"), Formula::until(P("b"), P("c"))));
    EXPECT_EQ(parse("a U (b U c)", kAB), parse("a U b U c", kAB));
}

TEST(Parse, Precedence) {
    // ! > && > || > U
    EXPECT_EQ(parse("!a && b || c", kAB),
              Formula::disj(Formula::conj(Formula::negation(P("a")), P("b")), P("c")));
    EXPECT_EQ(parse("a || b U c", kAB), Formula::until(Formula::disj(P("a"), P("b")), P("c")));
    // unary temporal operators bind tighter than binary ones
    EXPECT_EQ(parse("X a && <> b", kAB),
              Formula::conj(Formula::next(P("a")), Formula::eventually(P("b"))));
    EXPECT_EQ(parse("[]a U b", kAB), Formula::until(Formula::always(P("a")), P("b")));
}

TEST(Parse, WhitespaceInsensitive) {
    EXPECT_EQ(parse("  []<>a&&X(b)  ", kAB), parse("[] <> a && X b", kAB));
}

TEST(Parse, KeywordsInsideIdentifiers) {
    PropositionTable props{"Xa", "Ux", "X_1"};
    EXPECT_EQ(parse("Xa U Ux", props), Formula::until(Formula::prop(0), Formula::prop(1)));
    EXPECT_EQ(parse("X X_1", props), Formula::next(Formula::prop(2)));
}

TEST(Parse, SyntaxErrorCarriesPosition) {
    try {
        parse("a && ", kAB);
        FAIL() << "expected ParseError";
    } catch (const UnknownProposition&) {
        FAIL() << "wrong error kind";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 5u);
    }
    EXPECT_THROW(parse("(a", kAB), ParseError);
    EXPECT_THROW(parse("a b", kAB), ParseError);
    EXPECT_THROW(parse("U a", kAB), ParseError);
    EXPECT_THROW(parse("", kAB), ParseError);
}

TEST(Parse, UnknownProposition) {
    try {
        parse("a U zz", kAB);
        FAIL() << "expected UnknownProposition";
    } catch (const UnknownProposition& e) {
        EXPECT_EQ(e.name(), "zz");
        EXPECT_EQ(e.position(), 4u);
    }
}

TEST(Parse, EmptyTableRejected) { EXPECT_THROW(parse("true", PropositionTable{}), std::invalid_argument); }

TEST(PropositionTable, RejectsReservedNames) {
    PropositionTable t;
    EXPECT_THROW(t.add("U"), std::invalid_argument);
    EXPECT_THROW(t.add("true"), std::invalid_argument);
    EXPECT_THROW(t.add("1a"), std::invalid_argument);
    EXPECT_EQ(t.add("R1"), 0);
    EXPECT_EQ(t.add("R1"), 0);
}

TEST(Nnf, NegatedEventuallyBecomesRelease) {
    const Formula f = to_nnf(parse("!<> a", kAB));
    EXPECT_EQ(f, Formula::release(Formula::falsity(), Formula::negation(P("a"))));
}

TEST(Nnf, DoubleNegation) { EXPECT_EQ(to_nnf(parse("!!a", kAB)), P("a")); }

TEST(Nnf, NegatedUntil) {
    EXPECT_EQ(to_nnf(parse("!(a U b)", kAB)),
              Formula::release(Formula::negation(P("a")), Formula::negation(P("b"))));
}

TEST(Nnf, OutputIsNnf) {
    for (const char* text : {"!(a && X !b)", "[] <> a", "!([] (a || <> b))", "!X!a"}) {
        const Formula f = to_nnf(parse(text, kAB));
        EXPECT_TRUE(is_nnf(f)) << text;
    }
    EXPECT_FALSE(is_nnf(parse("<> a", kAB)));
}

namespace {

Formula random_formula(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> leaf(0, 3);
    if (depth == 0) {
        const int k = leaf(rng);
        return k == 3 ? Formula::truth() : Formula::prop(k);
    }
    std::uniform_int_distribution<int> pick(0, 9);
    switch (pick(rng)) {
        case 0: return Formula::negation(random_formula(rng, depth - 1));
        case 1: return Formula::next(random_formula(rng, depth - 1));
        case 2: return Formula::eventually(random_formula(rng, depth - 1));
        case 3: return Formula::always(random_formula(rng, depth - 1));
        case 4:
            return Formula::conj(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        case 5:
            return Formula::disj(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        case 6:
            return Formula::until(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        default: return random_formula(rng, 0);
    }
}

}  // namespace

TEST(Property, PrintParseRoundTrip) {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Formula f = random_formula(rng, 1 + i % 5);
        const std::string text = to_string(f, kAB);
        EXPECT_EQ(parse(text, kAB), f) << text;
    }
}

TEST(Property, NnfPreservesLassoSemantics) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> letter(0, 3), len(0, 3);
    for (int i = 0; i < 400; ++i) {
        const Formula f = random_formula(rng, 1 + i % 4);
        const Formula g = to_nnf(f);
        for (int j = 0; j < 20; ++j) {
            LassoWord w;
            for (int k = len(rng); k > 0; --k) w.stem.push_back(static_cast<LabelSet>(letter(rng)));
            for (int k = len(rng) + 1; k > 0; --k) w.loop.push_back(static_cast<LabelSet>(letter(rng)));
            EXPECT_EQ(eval_lasso(f, w), eval_lasso(g, w)) << to_string(f, kAB);
        }
    }
}
