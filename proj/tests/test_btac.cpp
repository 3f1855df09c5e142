#include <gtest/gtest.h>

#include <random>

#include "stitkit/btac.hpp"
#include "support/formula_gen.hpp"

using namespace stitkit;
using namespace stitkit::btac;

namespace {

// One moment w with two histories, agent 0 separating them, V(p) = {w/h1}.
BtacModel two_history_model() {
  return read_model(R"(btac
moment w
moment a parent w
moment b parent w
choice 0 w: {h1} {h2}
val p: w/h1
)");
}

bool has_condition(const std::vector<Violation>& v, const std::string& c) {
  for (const auto& x : v)
    if (x.condition == c) return true;
  return false;
}

}  // namespace

TEST(Btac, HistoriesInDepthFirstLeafOrder) {
  auto m = read_model("btac\nmoment r\nmoment x parent r\nmoment y parent x\nmoment z parent x\nmoment u parent r\n");
  ASSERT_EQ(m.history_count(), 3u);
  EXPECT_EQ(m.histories()[0], (std::vector<MomentId>{0, 1, 2}));
  EXPECT_EQ(m.histories()[1], (std::vector<MomentId>{0, 1, 3}));
  EXPECT_EQ(m.histories()[2], (std::vector<MomentId>{0, 4}));
  EXPECT_EQ(m.histories_through(1), (std::vector<HistoryId>{0, 1}));
}

TEST(Btac, ValidateExamples) {
  EXPECT_TRUE(validate_model(read_model("btac\nmoment w\nchoice 0 w: {h1}\n")).empty());

  auto clash = read_model("btac\nmoment w\nmoment a parent w\nmoment b parent w\n"
                          "choice 0 w: {h1} {h2}\nchoice 1 w: {h1} {h2}\n");
  auto v = validate_model(clash);
  ASSERT_TRUE(has_condition(v, "superadditivity"));
  EXPECT_NE(v[0].detail.find("agent 0 {h1}, agent 1 {h2}"), std::string::npos) << v[0].detail;

  auto stray = read_model("btac\nmoment w\nmoment a parent w\nmoment b parent w\n"
                          "choice 0 a: {h1 h2}\n");
  EXPECT_TRUE(has_condition(validate_model(stray), "partition"));

  BtacModel cyc({Moment{"a", 1}, Moment{"b", 0}});
  EXPECT_TRUE(has_condition(validate_model(cyc), "tree-likeness"));
}

TEST(Btac, EvalExamples) {
  auto m = two_history_model();
  ASSERT_TRUE(validate_model(m).empty());
  Index wh1{0, 0};
  EXPECT_TRUE(eval(m, wh1, parse("[0]p")));
  EXPECT_FALSE(eval(m, wh1, parse("[]p")));
  EXPECT_TRUE(eval(m, wh1, parse("{0}p")));
  EXPECT_FALSE(eval(m, Index{0, 1}, parse("[0]p")));
  EXPECT_FALSE(eval(m, wh1, parse("unknown_atom")));
  EXPECT_THROW(eval(m, Index{1, 1}, parse("p")), ModelError);
  EXPECT_TRUE(valid_in_model(m, parse("(p | ~p)")));
  EXPECT_FALSE(valid_in_model(m, parse("p")));
}

TEST(Btac, EnumerationExamples) {
  std::size_t with_empty = 0, with_full = 0;
  enumerate_models({1, 1, 1, {"p"}}, [&](const BtacModel& m) {
    if (m.history_count() == 1 && m.moment_count() == 1) {
      if (m.valuation().empty()) ++with_empty;
      else ++with_full;
    }
    return true;
  });
  EXPECT_EQ(with_empty, 1u);
  EXPECT_EQ(with_full, 1u);

  std::set<std::size_t> cells_seen;
  enumerate_models({1, 2, 1, {}}, [&](const BtacModel& m) {
    if (m.histories_through(0).size() == 2) cells_seen.insert(m.choice(0, 0).size());
    return true;
  });
  EXPECT_EQ(cells_seen, (std::set<std::size_t>{1, 2}));

  bool clash = false;
  std::size_t count = 0;
  enumerate_models({1, 2, 2, {}}, [&](const BtacModel& m) {
    ++count;
    EXPECT_TRUE(validate_model(m).empty());
    if (m.histories_through(0).size() == 2 && m.choice(0, 0).size() == 2 && m.choice(1, 0).size() == 2) clash = true;
    return true;
  });
  EXPECT_FALSE(clash);
  EXPECT_GT(count, 0u);

  EXPECT_THROW(enumerate_frames({4, 2, 1, {}}, [](const BtacModel&) { return true; }), std::invalid_argument);
  EXPECT_THROW(enumerate_models({2, 4, 2, {"p", "q", "r"}}, [](const BtacModel&) { return true; }),
               std::invalid_argument);
}

TEST(Btac, InterdefinabilityAndBoxIndependence) {
  std::mt19937_64 rng(11);
  testsupport::Vocabulary voc;
  std::vector<Formula> fs;
  for (int k = 0; k < 40; ++k) fs.push_back(testsupport::random_formula(rng, 9, voc));
  std::size_t models = 0;
  enumerate_models({1, 3, 2, {"p", "q"}}, [&](const BtacModel& m) {
    if (++models % 97 != 0) return true;
    for (const auto& f : fs) {
      const auto phi = f;
      for (Agent i = 0; i < 2; ++i) {
        EXPECT_TRUE(valid_in_model(m, iff(dstit(i, phi), conj(cstit(i, phi), neg(box(phi))))));
        EXPECT_TRUE(valid_in_model(m, iff(cstit(i, phi), disj(dstit(i, phi), box(phi)))));
        EXPECT_TRUE(valid_in_model(m, implies(box(phi), cstit(i, phi))));
      }
      for (MomentId w = 0; w < m.moment_count(); ++w) {
        auto e = moment_extension(m, w, box(phi));
        EXPECT_TRUE(std::all_of(e.begin(), e.end(), [&](bool b) { return b == e.front(); }));
      }
    }
    return true;
  });
  EXPECT_GT(models, 1000u);
}

TEST(Btac, TextRoundTrip) {
  auto m = two_history_model();
  auto again = read_model(write_model(m));
  EXPECT_EQ(write_model(again), write_model(m));
  EXPECT_THROW(read_model("btac\nmoment w\nchoice 0 w: {h9}\n"), FormatError);
  EXPECT_THROW(read_model("btac\nmoment w parent v\n"), FormatError);
  EXPECT_THROW(read_model("kripke\n"), FormatError);
  auto idx = parse_index(m, "w/h2");
  EXPECT_EQ(idx.moment, 0u);
  EXPECT_EQ(idx.history, 1u);
  EXPECT_THROW(parse_index(m, "a/h2"), ModelError);
}
