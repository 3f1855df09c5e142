#include <gtest/gtest.h>

#include <random>

#include "stitkit/solver.hpp"
#include "stitkit/translate.hpp"
#include "support/formula_gen.hpp"

using namespace stitkit;
using namespace stitkit::translate;

TEST(Biimp, Examples) {
  auto q = parse("q");
  auto tq = TranslationTable::build(q, Direction::ToCstit);
  EXPECT_EQ(biimp(q, tq).formula, parse("(_b0 <-> q)"));
  EXPECT_EQ(biimp(q, tq).length, 5u);

  auto d = parse("{0}p");
  auto td = TranslationTable::build(d, Direction::ToCstit);
  EXPECT_EQ(biimp(d, td).formula, parse("(_b1 <-> ([0]_b0 & ~[]_b0))"));

  auto c = parse("[0]p");
  auto tc = TranslationTable::build(c, Direction::ToDstit);
  EXPECT_EQ(biimp(c, tc).formula, parse("(_b1 <-> ({0}_b0 | []_b0))"));
  EXPECT_THROW(biimp(parse("r"), tc), TranslateError);
}

TEST(Tr, Examples) {
  EXPECT_EQ(tr(parse("{0}p")).formula, parse("(_b1 & ([](_b0 <-> p) & [](_b1 <-> ([0]_b0 & ~[]_b0))))"));
  EXPECT_EQ(tr(parse("q")).formula, parse("(_b0 & [](_b0 <-> q))"));
  EXPECT_EQ(tr_prime(parse("[0]p")).formula, parse("(_b1 & ([](_b0 <-> p) & [](_b1 <-> ({0}_b0 | []_b0))))"));
  EXPECT_EQ(tr_prime(parse("q")).formula, parse("(_b0 & [](_b0 <-> q))"));
}

TEST(Tr, WrongLanguage) {
  EXPECT_THROW(tr(parse("[0]p")), TranslateError);
  EXPECT_THROW(tr_prime(parse("{0}p")), TranslateError);
}

TEST(Tr, FreshAtomsAvoidUserAtoms) {
  auto f = parse("(_b0 & {1}_bx)");
  auto t = tr(f);
  EXPECT_EQ(t.table.prefix(), "_bb");
  for (const auto& [psi, name] : t.table.entries()) EXPECT_FALSE(atoms(f).count(name));
  EXPECT_EQ(atoms(t.formula).count("_b0"), 1u);
}

TEST(Tr, LengthAndPurity) {
  std::mt19937_64 rng(5);
  testsupport::Vocabulary dv;
  dv.cstit = false;
  testsupport::Vocabulary cv;
  cv.dstit = false;
  for (int k = 0; k < 500; ++k) {
    auto f = testsupport::random_formula(rng, 30, dv);
    auto t = tr(f);
    EXPECT_FALSE(contains_op(t.formula, Op::Dstit));
    EXPECT_LE(t.surface_length, 1 + 10 * length(f)) << print(f);
    EXPECT_LE(t.primitive_length, 1 + 23 * length(f)) << print(f);
    auto g = testsupport::random_formula(rng, 30, cv);
    auto u = tr_prime(g);
    EXPECT_FALSE(contains_op(u.formula, Op::Cstit));
    EXPECT_LE(u.surface_length, 1 + 10 * length(g)) << print(g);
  }
}

TEST(Tr, SurrogatesTrackSubformulas) {
  // In a model of tr(f), each surrogate agrees with its subformula everywhere.
  solver::SolverConfig cfg;
  cfg.agent_universe = 2;
  auto f = parse("({0}p & ~{1}p)");
  auto t = tr(f);
  auto r = solver::sat(t.formula, cfg);
  ASSERT_EQ(r.verdict, solver::Verdict::Sat);
  for (kripke::World w = 0; w < r.witness->size(); ++w)
    for (const auto& [psi, name] : t.table.entries())
      EXPECT_EQ(kripke::mc(*r.witness, w, atom(name)), kripke::mc(*r.witness, w, psi)) << print(psi);
}

TEST(Tr, SatisfiabilityPreservedAtSmallScale) {
  std::mt19937_64 rng(9);
  solver::SolverConfig cfg;
  cfg.agent_universe = 2;
  testsupport::Vocabulary dv;
  dv.cstit = false;
  testsupport::Vocabulary cv;
  cv.dstit = false;
  for (int k = 0; k < 25; ++k) {
    auto f = testsupport::random_formula(rng, 8, dv);
    EXPECT_EQ(solver::oracle(f, 3, cfg).verdict, solver::oracle(tr(f).formula, 3, cfg).verdict) << print(f);
    auto g = testsupport::random_formula(rng, 8, cv);
    EXPECT_EQ(solver::oracle(g, 3, cfg).verdict, solver::oracle(tr_prime(g).formula, 3, cfg).verdict) << print(g);
  }
}
