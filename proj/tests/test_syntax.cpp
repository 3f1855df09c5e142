#include <gtest/gtest.h>

#include <random>

#include "stitkit/syntax.hpp"
#include "support/formula_gen.hpp"

using namespace stitkit;

namespace {

Formula p() { return atom("p"); }
Formula q() { return atom("q"); }

}  // namespace

TEST(Parse, AtomAndNesting) {
  EXPECT_EQ(parse("p"), p());
  EXPECT_EQ(parse("[0](p & q)"), cstit(0, conj(p(), q())));
  EXPECT_EQ(parse("{3}~p"), dstit(3, neg(p())));
  EXPECT_EQ(parse("  [ ] p "), box(p()));
}

TEST(Parse, DualsDesugar) {
  EXPECT_EQ(parse("<1><0>p"), neg(cstit(1, neg(neg(cstit(0, neg(p())))))));
  EXPECT_EQ(parse("<>p"), neg(box(neg(p()))));
}

TEST(Parse, BinaryConnectivesDesugar) {
  EXPECT_EQ(parse("(p | q)"), neg(conj(neg(p()), neg(q()))));
  EXPECT_EQ(parse("(p -> q)"), neg(conj(p(), neg(q()))));
  EXPECT_EQ(parse("(p <-> q)"), conj(neg(conj(p(), neg(q()))), neg(conj(q(), neg(p())))));
}

TEST(Parse, OuterParenthesesOptional) {
  EXPECT_EQ(parse("p & q"), parse("(p & q)"));
  EXPECT_EQ(parse("[]p -> [0]p"), parse("([]p -> [0]p)"));
  EXPECT_EQ(parse("((p))"), p());
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("p & q & r"), ParseError);
  EXPECT_THROW(parse("(p & q"), ParseError);
  EXPECT_THROW(parse("P"), ParseError);
  EXPECT_THROW(parse("[x]p"), ParseError);
  EXPECT_THROW(parse("[-1]p"), ParseError);
  EXPECT_THROW(parse("[99999999999]p"), ParseError);
  EXPECT_THROW(parse("p q"), ParseError);
  try {
    parse("(p & ?)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(Print, CanonicalExamples) {
  EXPECT_EQ(print(p()), "p");
  EXPECT_EQ(print(box(p())), "[](p)");
  EXPECT_EQ(print(cstit(0, neg(p()))), "[0](~p)");
  EXPECT_EQ(print(cstit(2, conj(p(), q()))), "[2](p & q)");
  EXPECT_EQ(print(neg(conj(p(), q()))), "~(p & q)");
  EXPECT_EQ(print(dstit(1, p())), "{1}(p)");
}

TEST(Print, SugaredExamples) {
  EXPECT_EQ(print(parse("(<>[0]p -> <1><0>[0]p)"), PrintStyle::Sugared), "(<>[0]p -> <1><0>[0]p)");
  EXPECT_EQ(print(parse("[](p <-> [1][0]p)"), PrintStyle::Sugared), "[](p <-> [1][0]p)");
  EXPECT_EQ(print(parse("(p | ~q)"), PrintStyle::Sugared), "(p | ~q)");
}

TEST(Length, DefinitionExamples) {
  EXPECT_EQ(length(p()), 1u);
  EXPECT_EQ(length(cstit(0, p())), 4u);
  EXPECT_EQ(length(dstit(0, p())), 6u);
  EXPECT_EQ(length(conj(p(), q())), 5u);
  EXPECT_EQ(length(neg(p())), 2u);
  EXPECT_EQ(length(box(p())), 2u);
}

TEST(Subformulas, Examples) {
  EXPECT_EQ(subformulas(p()), std::vector<Formula>{p()});
  EXPECT_EQ(subformulas(cstit(0, p())), (std::vector<Formula>{p(), cstit(0, p())}));
  EXPECT_EQ(subformulas(conj(p(), neg(p()))), (std::vector<Formula>{p(), neg(p()), conj(p(), neg(p()))}));
}

TEST(Agents, Examples) {
  EXPECT_TRUE(agents(box(p())).empty());
  EXPECT_EQ(agents(cstit(3, dstit(0, p()))), (std::set<Agent>{0, 3}));
  EXPECT_EQ(agents(conj(cstit(0, p()), cstit(0, q()))), (std::set<Agent>{0}));
}

TEST(Language, Tags) {
  EXPECT_TRUE(in_language(parse("[0]p"), LanguageTag::Cstit));
  EXPECT_FALSE(in_language(parse("[0]p"), LanguageTag::Dstit));
  EXPECT_TRUE(in_language(parse("{0}p & []q"), LanguageTag::Dstit));
  EXPECT_TRUE(in_language(parse("p"), LanguageTag::Cstit));
  EXPECT_TRUE(in_language(parse("p"), LanguageTag::Dstit));
}

TEST(Rewrites, ExpandDstitAndDoubleNegation) {
  EXPECT_EQ(expand_dstit(parse("{0}p")), parse("([0]p & ~[]p)"));
  EXPECT_EQ(expand_dstit(parse("~{1}{0}p")), parse("~([1]([0]p & ~[]p) & ~[]([0]p & ~[]p))"));
  EXPECT_EQ(strip_double_negations(parse("~~[0]~~p")), parse("[0]p"));
  EXPECT_EQ(strip_double_negations(parse("~~~p")), parse("~p"));
  EXPECT_EQ(substitute(parse("([0]x -> x)"), {{"x", parse("(p & q)")}}), parse("([0](p & q) -> (p & q))"));
}

TEST(Properties, RoundTripLengthAndSubformulaBounds) {
  std::mt19937_64 rng(7);
  testsupport::Vocabulary voc;
  voc.atoms = {"p", "q", "r_1"};
  voc.agents = {0, 1, 12};
  for (int k = 0; k < 2000; ++k) {
    Formula f = testsupport::random_formula(rng, 30, voc);
    ASSERT_EQ(parse(print(f)), f) << print(f);
    ASSERT_EQ(parse(print(f, PrintStyle::Sugared)), f) << print(f, PrintStyle::Sugared);
    ASSERT_EQ(print(parse(print(f))), print(f));
    auto sf = subformulas(f);
    ASSERT_LE(sf.size(), length(f));
    ASSERT_EQ(sf.back(), f);
    for (const auto& g : sf)
      if (!(g == f)) ASSERT_LT(length(g), length(f));
  }
}

TEST(Properties, EnumeratorCounts) {
  testsupport::Vocabulary voc;
  testsupport::FormulaEnumerator e(voc);
  std::size_t total = 0;
  e.for_each_up_to(6, [&](const Formula& f) {
    ++total;
    EXPECT_LE(length(f), 6u);
  });
  for (std::size_t n = 1; n <= 6; ++n)
    for (const auto& f : e.of_length(n)) ASSERT_EQ(length(f), n);
  EXPECT_GT(total, 0u);
}
