#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "stitkit/cli.hpp"
#include "stitkit/kripke.hpp"
#include "stitkit/syntax.hpp"

using namespace stitkit;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& rel) { return std::string(STITKIT_FIXTURES) + "/" + rel; }

}  // namespace

TEST(Cli, SatUnsat) {
  auto r = run({"sat", "(p & ~p)", "--agents", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.substr(0, 6), "UNSAT\n");
}

TEST(Cli, ValidInclusion) {
  auto r = run({"valid", "([]p -> [0]p)", "--agents", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 6), "VALID\n");
  EXPECT_EQ(run({"valid", "([0]p -> []p)", "--agents", "2"}).code, 1);
}

TEST(Cli, TranslateExample) {
  auto r = run({"translate", "--to", "cstit", "{0}p"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse(r.out), parse("(_b1 & ([](_b0 <-> p) & [](_b1 <-> ([0]_b0 & ~[]_b0))))"));
  EXPECT_EQ(run({"translate", "--to", "dstit", "{0}p"}).code, 2);
  auto back = run({"translate", "--to", "dstit", "[1]q"});
  EXPECT_EQ(back.code, 0);
  EXPECT_TRUE(in_language(parse(back.out), LanguageTag::Dstit));
}

TEST(Cli, AgentsIsMandatory) {
  auto r = run({"sat", "p"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--agents"), std::string::npos);
  EXPECT_EQ(run({"valid", "p"}).code, 2);
  EXPECT_EQ(run({"sat", "[3]p", "--agents", "2"}).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"parse", "(p &"}).code, 2);
  EXPECT_EQ(run({"sat", "p", "--agents", "1", "--engine", "magic"}).code, 2);
  EXPECT_EQ(run({"check", fixture("models/missing.kripke"), "--at", "a", "p"}).code, 2);
  EXPECT_EQ(run({"check", fixture("models/grid.kripke"), "--at", "zz", "p"}).code, 2);
  EXPECT_EQ(run({"oracle", "p", "--max-worlds", "99"}).code, 2);
  EXPECT_EQ(run({"sweep", "--models", "kripke"}).code, 2);
  EXPECT_EQ(run({"sweep", "--schema", "AIA", "--max", "planets=3"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, Parse) {
  auto r = run({"parse", "([]p -> <0>{1}q)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("length: 18\n"), std::string::npos);
  EXPECT_NE(r.out.find("subformulas: 10\n"), std::string::npos);
  EXPECT_NE(r.out.find("agents: 0 1\n"), std::string::npos);
  auto j = nlohmann::json::parse(run({"parse", "--json", "[0]p"}).out);
  EXPECT_EQ(j["length"], 4);
  EXPECT_EQ(j["agents"], nlohmann::json::array({0}));
}

TEST(Cli, CheckBothModelKinds) {
  const auto btac = fixture("models/two_agents.btac");
  EXPECT_EQ(run({"check", btac, "--at", "w/h1", "[0]p"}).code, 0);
  EXPECT_EQ(run({"check", btac, "--at", "w/h1", "[1]p"}).code, 1);
  EXPECT_EQ(run({"check", btac, "--at", "w/h5", "p"}).code, 2);
  EXPECT_EQ(run({"check", fixture("models/grid.kripke"), "--at", "a", "<1>[0]~q"}).code, 0);
  EXPECT_EQ(run({"check", fixture("models/grid.moment"), "--at", "d", "[1]q"}).code, 1);
}

TEST(Cli, EmittedModelsReparseAndValidate) {
  auto check_model = [](const std::string& text) {
    auto any = kripke::read_model(text);
    if (auto* k = std::get_if<kripke::KripkeModel>(&any))
      EXPECT_TRUE(kripke::validate(*k).empty()) << text;
    else
      EXPECT_FALSE(kripke::rectangularity_violation(std::get<kripke::MomentModel>(any))) << text;
  };
  auto sat = nlohmann::json::parse(run({"sat", "--json", "((<>[0]p & <>[1]q) & <>~p)", "--agents", "3"}).out);
  ASSERT_EQ(sat["verdict"], "SAT");
  check_model(sat["witness"]);
  auto counter = nlohmann::json::parse(run({"valid", "--json", "([0]p -> [1]p)", "--agents", "2"}).out);
  ASSERT_EQ(counter["verdict"], "NOT-VALID");
  check_model(counter["countermodel"]);
  auto filtered = run({"filter", fixture("models/grid.kripke"), "[0]p"});
  ASSERT_EQ(filtered.code, 0);
  check_model(filtered.out);
  auto oracle = nlohmann::json::parse(run({"oracle", "--json", "(<0>q & [1]p)", "--max-worlds", "3"}).out);
  ASSERT_EQ(oracle["verdict"], "SAT");
  check_model(oracle["witness"]);
}

TEST(Cli, ReportsAreDeterministic) {
  const std::vector<std::string> args{"sat", "--json", "((<>[0]p & <>[1]q) & (<>[0]~p & <>r))", "--agents", "2"};
  EXPECT_EQ(run(args).out, run(args).out);
  auto threaded = args;
  threaded.push_back("--threads");
  threaded.push_back("3");
  EXPECT_EQ(nlohmann::json::parse(run(threaded).out)["verdict"], "SAT");
}

TEST(Cli, Inconclusive) {
  auto r = run({"sat", "(<>p & <>~p)", "--agents", "1", "--bound", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.out.substr(0, 12), "INCONCLUSIVE");
  // An oracle run below the theoretical bound cannot certify UNSAT.
  auto bounded = run({"sat", "--json", "(<>p & <>~p)", "--agents", "1", "--engine", "oracle", "--bound", "1"});
  EXPECT_EQ(bounded.code, 3);
  EXPECT_EQ(nlohmann::json::parse(bounded.out)["stats"]["bounded_unsat"], true);
  EXPECT_EQ(run({"sat", "(<>[0]p & [0]~p)", "--agents", "1", "--engine", "oracle", "--bound", "2"}).code, 0);
}

TEST(Cli, ProveAndAxiom) {
  auto ok = run({"prove", fixture("derivations/aia1_from_aaia.deriv")});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out.substr(0, 9), "ACCEPTED ");
  auto wrong = run({"prove", fixture("derivations/aia1_from_aaia.deriv"), "--system", "XU"});
  EXPECT_EQ(wrong.code, 1);
  EXPECT_NE(wrong.out.find("line 1"), std::string::npos);
  EXPECT_EQ(run({"prove", fixture("derivations/nope.deriv")}).code, 2);

  auto ax = run({"axiom", "AAIA", "--k", "2", "--bind", "phi=p"});
  EXPECT_EQ(ax.code, 0);
  EXPECT_EQ(parse(ax.out), parse("(<>p -> <2>(<0>p & <1>p))"));
  auto aia = run({"axiom", "AIA", "--k", "1", "--bind", "phi0=p", "--bind", "phi1=q"});
  EXPECT_EQ(parse(aia.out), parse("((<>[0]p & <>[1]q) -> <>([0]p & [1]q))"));
  EXPECT_EQ(run({"axiom", "GPerm", "--k", "1"}).code, 2);
  EXPECT_EQ(run({"axiom", "Nonsense", "--bind", "phi=p"}).code, 2);
}

TEST(Cli, Sweep) {
  auto ok = run({"sweep", "--schema", "AAIA", "--models", "btac", "--max", "histories=3"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("failures=0"), std::string::npos);
  auto bad = run({"sweep", "--json", "--template", "(<>x -> [0]x)", "--models", "kripke", "--max", "worlds=2",
                  "--max-counterexamples", "1"});
  EXPECT_EQ(bad.code, 1);
  auto j = nlohmann::json::parse(bad.out);
  ASSERT_EQ(j["counterexamples"].size(), 1u);
  auto any = kripke::read_model(j["counterexamples"][0]["model"].get<std::string>());
  auto& model = std::get<kripke::KripkeModel>(any);
  EXPECT_FALSE(kripke::mc(model, j["counterexamples"][0]["index"].get<std::string>(),
                          parse(j["counterexamples"][0]["instance"].get<std::string>())));
}
