#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "stitkit/axioms.hpp"
#include "stitkit/btac.hpp"
#include "stitkit/kripke.hpp"
#include "stitkit/solver.hpp"

using namespace stitkit;
using namespace stitkit::axioms;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(STITKIT_FIXTURES) + "/derivations/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Schema schema(SchemaKind kind, std::size_t k = 0) {
  Schema s;
  s.kind = kind;
  s.k = k;
  return s;
}

Schema gperm(std::size_t k, Agent l, Agent m, Agent n) {
  Schema s = schema(SchemaKind::GPerm, k);
  s.l = l;
  s.m = m;
  s.n = n;
  return s;
}

const std::vector<std::string> kFixtures{
    "aia1_from_aaia.deriv",    "aia2_from_aaia.deriv",   "aia3_from_aaia.deriv", "box_s5_from_gperm.deriv",
    "inclbox_from_gperm.deriv", "aaia_from_gperm.deriv",  "xu_padding.deriv",  "aia_monotone.deriv",
};

}  // namespace

TEST(Instantiate, Examples) {
  EXPECT_EQ(instantiate(schema(SchemaKind::AAIA, 1), {{"phi", parse("p")}}), parse("(<>p -> <1><0>p)"));
  EXPECT_EQ(instantiate(schema(SchemaKind::AIA, 1), {{"phi0", parse("p")}, {"phi1", parse("q")}}),
            parse("((<>[0]p & <>[1]q) -> <>([0]p & [1]q))"));
  EXPECT_EQ(instantiate(schema(SchemaKind::DefBox), {{"phi", parse("p")}}), parse("([]p <-> [1][0]p)"));
  EXPECT_EQ(instantiate(gperm(1, 1, 0, 0), {{"phi", parse("p")}}), parse("(<1><0>p -> <0><1>p)"));
  EXPECT_EQ(instantiate(gperm(0, 2, 1, 0), {{"phi", parse("q")}}), parse("(<2><1>q -> <0>~(q & ~q))"));
  EXPECT_EQ(instantiate(schema(SchemaKind::ChurchRosser), {{"phi", parse("p")}}), parse("(<0>[1]p -> [1]<0>p)"));
  Schema xu = schema(SchemaKind::AIA, 1);
  xu.agents = {0, 2};
  EXPECT_EQ(instantiate(xu, {{"phi0", parse("p")}, {"phi1", parse("q")}}),
            parse("((<>[0]p & <>[2]q) -> <>([0]p & [2]q))"));
}

TEST(Instantiate, Errors) {
  EXPECT_THROW(instantiate(schema(SchemaKind::AAIA, 0), {{"phi", parse("p")}}), AxiomError);
  EXPECT_THROW(instantiate(schema(SchemaKind::AIA, 1), {{"phi0", parse("p")}}), AxiomError);
  EXPECT_THROW(instantiate(schema(SchemaKind::S5BoxT), {{"psi", parse("p")}}), AxiomError);
  Schema dup = schema(SchemaKind::AIA, 1);
  dup.agents = {1, 1};
  EXPECT_THROW(instantiate(dup, {{"phi0", parse("p")}, {"phi1", parse("q")}}), AxiomError);
}

TEST(Instances, AreValid) {
  solver::SolverConfig cfg;
  cfg.agent_universe = 3;
  const Bindings one{{"phi", parse("(p & [1]q)")}, {"psi", parse("<>q")}};
  std::vector<Schema> all{schema(SchemaKind::S5BoxK), schema(SchemaKind::S5BoxT), schema(SchemaKind::S5Box5),
                          schema(SchemaKind::S5iK),   schema(SchemaKind::S5iT),   schema(SchemaKind::S5i5),
                          schema(SchemaKind::InclBox), schema(SchemaKind::AAIA, 2), gperm(2, 2, 0, 1),
                          schema(SchemaKind::DefBox), schema(SchemaKind::Perm01), schema(SchemaKind::ChurchRosser)};
  for (const auto& s : all) {
    Bindings b;
    for (const auto& name : slots(s)) b.insert_or_assign(name, one.count(name) ? one.at(name) : parse("~p"));
    EXPECT_TRUE(solver::valid(instantiate(s, b), cfg)) << describe(s);
  }
}

TEST(Consequence, Propositional) {
  EXPECT_TRUE(propositional_consequence({}, parse("([0]p | ~[0]p)")));
  EXPECT_TRUE(propositional_consequence({parse("([0]p -> q)"), parse("[0]p")}, parse("q")));
  EXPECT_TRUE(propositional_consequence({parse("[0]~~p")}, parse("[0]p")));
  EXPECT_FALSE(propositional_consequence({parse("[0]p")}, parse("p")));
}

TEST(Consequence, S5Fusion) {
  EXPECT_TRUE(s5_consequence({}, parse("([0]p -> p)"), false, {0}));
  EXPECT_FALSE(s5_consequence({}, parse("([0]p -> p)"), false, {1}));
  EXPECT_TRUE(s5_consequence({}, parse("(<1>[1]p -> [1]p)"), false, {1}));
  EXPECT_TRUE(s5_consequence({parse("p")}, parse("[]p"), true, {}));
  EXPECT_FALSE(s5_consequence({}, parse("([0]p -> [1]p)"), true, {0, 1}));
  // Interaction principles are not fusion consequences unless inclusion is requested.
  EXPECT_FALSE(s5_consequence({}, parse("([]p -> [0]p)"), true, {0}));
  EXPECT_TRUE(s5_consequence({}, parse("([]p -> [0]p)"), true, {0}, true));
  EXPECT_TRUE(s5_consequence({parse("(q -> <><1>p)")}, parse("(q -> <>p)"), true, {1}, true));
  EXPECT_FALSE(s5_consequence({}, parse("([0]p -> []p)"), true, {0}, true));
  EXPECT_FALSE(s5_consequence({}, parse("([]p -> [1]p)"), true, {0}, true));
}

TEST(Derivations, FixturesAccepted) {
  for (const auto& name : kFixtures) {
    auto d = parse_derivation(fixture(name));
    auto r = check(d);
    EXPECT_TRUE(r.accepted) << name << ": " << r.message;
  }
}

TEST(Derivations, ConclusionsAreTheTargetSchemas) {
  auto last = [](const std::string& name) { return parse_derivation(fixture(name)).lines.back().formula; };
  const Bindings pq{{"phi0", parse("p")}, {"phi1", parse("q")}};
  EXPECT_EQ(last("aia1_from_aaia.deriv"), instantiate(schema(SchemaKind::AIA, 1), pq));
  EXPECT_EQ(last("aia2_from_aaia.deriv"),
            instantiate(schema(SchemaKind::AIA, 2), {{"phi0", parse("p")}, {"phi1", parse("q")}, {"phi2", parse("r")}}));
  EXPECT_EQ(last("aia3_from_aaia.deriv"),
            instantiate(schema(SchemaKind::AIA, 3),
                        {{"phi0", parse("p")}, {"phi1", parse("q")}, {"phi2", parse("r")}, {"phi3", parse("s")}}));
  EXPECT_EQ(last("aaia_from_gperm.deriv"), instantiate(schema(SchemaKind::AAIA, 2), {{"phi", parse("p")}}));
  Schema incl = schema(SchemaKind::InclBox);
  incl.i = 2;
  EXPECT_EQ(last("inclbox_from_gperm.deriv"), instantiate(incl, {{"phi", parse("p")}}));
  auto box_s5 = parse_derivation(fixture("box_s5_from_gperm.deriv"));
  std::set<Formula> proved;
  for (const auto& l : box_s5.lines) proved.insert(l.formula);
  EXPECT_TRUE(proved.count(instantiate(schema(SchemaKind::S5Box5), {{"phi", parse("p")}})));
  EXPECT_TRUE(proved.count(instantiate(schema(SchemaKind::S5BoxT), {{"phi", parse("p")}})));
  EXPECT_TRUE(proved.count(instantiate(schema(SchemaKind::S5BoxK), {{"phi", parse("p")}, {"psi", parse("q")}})));
  Schema xu = schema(SchemaKind::AIA, 1);
  xu.agents = {0, 2};
  EXPECT_EQ(last("xu_padding.deriv"), instantiate(xu, pq));
  EXPECT_EQ(last("aia_monotone.deriv"), instantiate(schema(SchemaKind::AIA, 1), pq));
}

TEST(Derivations, EveryLineIsValid) {
  solver::SolverConfig cfg;
  cfg.agent_universe = 4;
  for (const auto& name : kFixtures)
    for (const auto& l : parse_derivation(fixture(name)).lines)
      EXPECT_TRUE(solver::valid(l.formula, cfg)) << name << " line " << l.label;
}

TEST(Derivations, CorruptedLineRejectedWhereItIs) {
  auto d = parse_derivation(fixture("aia1_from_aaia.deriv"));
  d.lines[1].formula = neg(d.lines[1].formula);
  auto r = check(d);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.label, "2");
}

TEST(Derivations, EverySingleMutationRejected) {
  for (const auto& name : kFixtures) {
    const auto d = parse_derivation(fixture(name));
    for (std::size_t k = 0; k < d.lines.size(); ++k) {
      auto negated = d;
      negated.lines[k].formula = neg(negated.lines[k].formula);
      EXPECT_FALSE(check(negated).accepted) << name << " negated line " << d.lines[k].label;
      auto renamed = d;
      auto names = atoms(d.lines[k].formula);
      renamed.lines[k].formula = substitute(d.lines[k].formula, {{*names.begin(), atom("z")}});
      EXPECT_FALSE(check(renamed).accepted) << name << " renamed atom in line " << d.lines[k].label;
    }
  }
}

TEST(Derivations, SystemRestrictions) {
  auto d = parse_derivation(fixture("aia1_from_aaia.deriv"));
  auto r = check(d, System::Xu);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.label, "1");
  auto g = parse_derivation(fixture("aaia_from_gperm.deriv"));
  EXPECT_FALSE(check(g, System::Aaia).accepted);
  auto text = std::string("system GPERM-SYS\n1: ([]p -> p) ; S5 box\n");
  EXPECT_FALSE(check(parse_derivation(text)).accepted);
  EXPECT_FALSE(check(parse_derivation("system XU\n1: [0]~(p & ~p) ; NEC agent 0 1\n")).accepted);
}

TEST(Derivations, FormatErrors) {
  EXPECT_THROW(parse_derivation("1: p ; PL\n"), FormatError);
  EXPECT_THROW(parse_derivation("system FOO\n"), FormatError);
  EXPECT_THROW(parse_derivation("system XU\n1: p PL\n"), FormatError);
  EXPECT_THROW(parse_derivation("system XU\n1: p ; MAGIC\n"), FormatError);
  EXPECT_THROW(parse_derivation("system XU\n1: p ; PL\n1: p ; PL\n"), FormatError);
  try {
    parse_derivation("system XU\n\n2: (p & ; PL\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  auto fwd = parse_derivation("system XU\n1: p ; MP 2 3\n");
  auto r = check(fwd);
  EXPECT_FALSE(r.accepted);
  EXPECT_NE(r.message.find("earlier"), std::string::npos);
}

TEST(Audit, SmallSweepsFindNothing) {
  std::vector<Schema> s{schema(SchemaKind::AAIA, 2), gperm(1, 0, 1, 1), gperm(1, 2, 2, 0)};
  auto btac = semantic_audit(s, default_grid(), ModelSource::Btac, {1, 3, 4, 3});
  EXPECT_TRUE(btac.ok()) << btac.counterexamples.front().instance.hash();
  EXPECT_GT(btac.structures, 10u);
  auto kr = semantic_audit({gperm(1, 0, 1, 1)}, default_grid(), ModelSource::Kripke, {1, 3, 3, 3});
  EXPECT_TRUE(kr.ok());
  EXPECT_EQ(kr.instances, 20u);
}

TEST(Audit, BrokenSchemaRefuted) {
  Schema broken;
  broken.kind = SchemaKind::Custom;
  broken.custom = parse("(<>x -> [0]x)");
  broken.custom_slots = {"x"};
  broken.custom_name = "broken";
  auto r = semantic_audit({broken}, default_grid(), ModelSource::Kripke, {1, 3, 2, 2});
  ASSERT_FALSE(r.ok());
  const auto& ce = r.counterexamples.front();
  auto model = std::get<kripke::KripkeModel>(kripke::read_model(ce.model));
  EXPECT_FALSE(kripke::mc(model, ce.index, ce.instance));
  auto silent = semantic_audit({broken}, default_grid(), ModelSource::Kripke, {1, 3, 2, 2}, 0);
  EXPECT_FALSE(silent.ok());
  EXPECT_TRUE(silent.counterexamples.empty());
  EXPECT_EQ(silent.failures, r.failures);
  auto b = semantic_audit({broken}, default_grid(), ModelSource::Btac, {1, 2, 4, 1});
  ASSERT_FALSE(b.ok());
  auto bm = btac::read_model(b.counterexamples.front().model);
  EXPECT_FALSE(btac::eval(bm, btac::parse_index(bm, b.counterexamples.front().index), b.counterexamples.front().instance));
}
