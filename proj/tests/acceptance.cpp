// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stitkit/axioms.hpp"
#include "stitkit/cli.hpp"
#include "stitkit/kripke.hpp"
#include "stitkit/solver.hpp"
#include "stitkit/syntax.hpp"
#include "stitkit/translate.hpp"
#include "support/formula_gen.hpp"
#include "support/product_oracle.hpp"

using namespace stitkit;
using testsupport::Vocabulary;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs of %.0fs", secs, limit_s);
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " " << title << ": " << o.detail << " ("
            << timing << (in_time ? "" : ", too slow") << ")" << std::endl;
}

// Length recomputed from the clause table, independent of Formula::length.
std::size_t clause_length(const Formula& f) {
  switch (f.op()) {
    case Op::Atom: return 1;
    case Op::Not: return 1 + clause_length(f.body());
    case Op::And: return 3 + clause_length(f.lhs()) + clause_length(f.rhs());
    case Op::Cstit: return 3 + clause_length(f.body());
    case Op::Dstit: return 5 + clause_length(f.body());
    case Op::Box: return 1 + clause_length(f.body());
  }
  return 0;
}

Agent universe_for(const Formula& f) {
  const auto a = agents(f);
  return a.empty() ? 1 : *a.rbegin() + 1;
}

std::string fixture(const std::string& name) { return std::string(STITKIT_FIXTURES) + "/derivations/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion1() {
  std::mt19937_64 rng(20260101);
  Vocabulary voc;
  voc.atoms = {"p", "q", "r"};
  voc.agents = {0, 1, 2};
  std::size_t mismatches = 0, sf_violations = 0, longest = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto f = testsupport::random_formula(rng, 60, voc);
    const auto len = length(f);
    longest = std::max(longest, len);
    if (len != clause_length(f)) ++mismatches;
    if (subformulas(f).size() > len) ++sf_violations;
  }
  return {mismatches == 0 && sf_violations == 0,
          "1000 formulas up to length " + std::to_string(longest) + ", " + std::to_string(mismatches) +
              " length mismatches, " + std::to_string(sf_violations) + " sf-count violations"};
}

Outcome criterion2() {
  using namespace axioms;
  std::vector<Schema> schemas;
  for (std::size_t k = 1; k <= 2; ++k) {
    Schema aia;
    aia.kind = SchemaKind::AIA;
    aia.k = k;
    schemas.push_back(aia);
    Schema aaia;
    aaia.kind = SchemaKind::AAIA;
    aaia.k = k;
    schemas.push_back(aaia);
  }
  for (std::size_t k = 0; k <= 2; ++k)
    for (Agent l = 0; l < 3; ++l)
      for (Agent m = 0; m < 3; ++m)
        for (Agent n = 0; n < 3; ++n) {
          Schema g;
          g.kind = SchemaKind::GPerm;
          g.k = k;
          g.l = l;
          g.m = m;
          g.n = n;
          schemas.push_back(g);
        }
  const AuditBounds bounds{2, 4, 4, 3};
  const auto b = semantic_audit(schemas, default_grid(), ModelSource::Btac, bounds);
  const auto k = semantic_audit(schemas, default_grid(), ModelSource::Kripke, bounds);
  std::string detail = std::to_string(b.instances) + " instances; BT+AC " + std::to_string(b.structures) +
                       " structures, " + std::to_string(b.counterexamples.size()) + " counterexamples; Kripke " +
                       std::to_string(k.structures) + " structures, " + std::to_string(k.counterexamples.size()) +
                       " counterexamples";
  if (!b.ok()) detail += "; first: " + b.counterexamples.front().schema;
  if (!k.ok()) detail += "; first: " + k.counterexamples.front().schema;
  return {b.ok() && k.ok(), detail};
}

// Rectangular moment model: every combination of cells occurs, some more than once.
kripke::KripkeModel random_moment_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cells(1, 4), coin(0, 1), extra(0, 4);
  const Agent stored = 1 + coin(rng);
  kripke::MomentModel mm;
  mm.agent_universe = stored + coin(rng);
  std::vector<std::size_t> counts(stored);
  for (auto& c : counts) c = cells(rng);
  std::vector<std::vector<std::size_t>> tuples{{}};
  for (Agent i = 0; i < stored; ++i) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& t : tuples)
      for (std::size_t c = 0; c < counts[i]; ++c) {
        auto u = t;
        u.push_back(c);
        next.push_back(u);
      }
    tuples = next;
  }
  const int copies = extra(rng);
  for (int k = 0; k < copies; ++k) tuples.push_back(tuples[std::uniform_int_distribution<std::size_t>(0, tuples.size() - 1)(rng)]);
  std::vector<std::vector<std::uint32_t>> labels(stored);
  for (std::size_t w = 0; w < tuples.size(); ++w) {
    mm.worlds.push_back("w" + std::to_string(w));
    for (Agent i = 0; i < stored; ++i) labels[i].push_back(static_cast<std::uint32_t>(tuples[w][i]));
  }
  for (Agent i = 0; i < stored; ++i) mm.partitions.emplace(i, Partition(labels[i]));
  for (const std::string a : {"p", "q", "r"}) {
    std::vector<bool> v(mm.size());
    for (std::size_t w = 0; w < v.size(); ++w) v[w] = coin(rng);
    mm.valuation.emplace(a, v);
  }
  return kripke::moment_to_kripke(mm);
}

Outcome criterion3() {
  std::mt19937_64 rng(7);
  std::vector<kripke::KripkeModel> frames;
  kripke::enumerate_frames(4, 2, 3, [&](const kripke::KripkeModel& m) {
    frames.push_back(m);
    return true;
  });
  std::uniform_int_distribution<int> coin(0, 1);
  Vocabulary voc;
  voc.atoms = {"p", "q", "r"};
  std::size_t mismatches = 0, oversize = 0, invalid = 0, largest = 0, collapsed = 0;
  for (int k = 0; k < 200; ++k) {
    kripke::KripkeModel m;
    if (k % 2 == 0) {
      m = random_moment_model(rng);
    } else {
      m = frames[std::uniform_int_distribution<std::size_t>(0, frames.size() - 1)(rng)];
      for (const std::string a : {"p", "q", "r"}) {
        std::vector<bool> v(m.size());
        for (std::size_t w = 0; w < v.size(); ++w) v[w] = coin(rng);
        m.valuation.insert_or_assign(a, v);
      }
      m = kripke::generated_submodel(m, std::uniform_int_distribution<kripke::World>(0, m.size() - 1)(rng));
    }
    voc.agents.clear();
    for (Agent i = 0; i < std::min<Agent>(m.agent_universe, 2); ++i) voc.agents.push_back(i);
    const auto f = testsupport::random_formula(rng, 20, voc);
    const auto fm = kripke::filtrate(m, f);
    largest = std::max(largest, fm.size());
    collapsed += fm.size() < m.size();
    if (length(f) < 63 && fm.size() > (std::size_t{1} << length(f))) ++oversize;
    if (!kripke::validate(fm).empty()) ++invalid;
    const auto sf = subformulas(f);
    const auto fine = subformulas(expand_dstit(f));
    for (kripke::World w = 0; w < m.size(); ++w) {
      // [w] is the filtrated world standing for the first world that agrees with w on the closure.
      std::optional<kripke::World> image;
      for (kripke::World c = 0; c < fm.size() && !image; ++c) {
        const auto u = *m.find_world(fm.worlds[c]);
        bool same = true;
        for (const auto& s : fine) same = same && kripke::mc(m, u, s) == kripke::mc(m, w, s);
        if (same) image = c;
      }
      if (!image) {
        ++mismatches;
        continue;
      }
      for (const auto& s : sf)
        if (kripke::mc(m, w, s) != kripke::mc(fm, *image, s)) ++mismatches;
    }
  }
  return {mismatches == 0 && oversize == 0,
          "200 pairs, " + std::to_string(mismatches) + " truth mismatches, " + std::to_string(oversize) +
              " over 2^length, " + std::to_string(collapsed) + " proper quotients, largest filtration " +
              std::to_string(largest) + " worlds, " +
              std::to_string(invalid) + " filtrations failing validate"};
}

Outcome criterion4() {
  testsupport::FormulaEnumerator gen(Vocabulary{});
  solver::SolverConfig cfg;
  cfg.agent_universe = 2;
  std::size_t count = 0, disagreements = 0, class_splits = 0, sat = 0;
  gen.for_each_up_to(12, [&](const Formula& f) {
    ++count;
    const auto s = solver::sat(f, cfg).verdict;
    const auto o = solver::oracle(f, 4, cfg);
    if (s != o.verdict) ++disagreements;
    if (o.stats.kripke_class_verdict && *o.stats.kripke_class_verdict != o.verdict) ++class_splits;
    sat += s == solver::Verdict::Sat;
  });
  return {disagreements == 0, std::to_string(count) + " formulas (" + std::to_string(sat) + " SAT), " +
                                  std::to_string(disagreements) + " disagreements, " + std::to_string(class_splits) +
                                  " moment/Kripke class splits"};
}

Outcome criterion5() {
  std::mt19937_64 rng(55);
  Vocabulary dstit_voc, cstit_voc;
  dstit_voc.cstit = false;
  cstit_voc.dstit = false;
  std::size_t disagreements = 0, surface_over = 0, primitive_over = 0, worst = 0, inputs = 0;
  auto run_one = [&](const Formula& f, translate::Direction dir) {
    const auto t = translate::translate(f, dir);
    solver::SolverConfig cfg;
    cfg.agent_universe = std::max(universe_for(f), universe_for(t.formula));
    if (solver::oracle(f, 3, cfg).verdict != solver::oracle(t.formula, 3, cfg).verdict) ++disagreements;
    const auto bound = 1 + translate::kLengthFactor * length(f);
    surface_over += t.surface_length > bound;
    primitive_over += t.primitive_length > bound;
    worst = std::max(worst, (t.surface_length + length(f) - 1) / length(f));
    ++inputs;
  };
  while (inputs < 50) {
    const auto f = testsupport::random_formula(rng, 10, dstit_voc);
    if (contains_op(f, Op::Dstit)) run_one(f, translate::Direction::ToCstit);
  }
  while (inputs < 100) {
    const auto f = testsupport::random_formula(rng, 10, cstit_voc);
    if (contains_op(f, Op::Cstit)) run_one(f, translate::Direction::ToDstit);
  }
  return {disagreements == 0 && surface_over == 0,
          "100 inputs, " + std::to_string(disagreements) + " oracle disagreements, " + std::to_string(surface_over) +
              " over 1+14*length, largest ratio " + std::to_string(worst) + "; fully desugared output exceeds the bound on " +
              std::to_string(primitive_over) + " inputs"};
}

Outcome criterion6() {
  struct Replay {
    std::string file;
    std::optional<std::size_t> lines;
  };
  const std::vector<Replay> replays{{"aia1_from_aaia.deriv", 7},   {"aia2_from_aaia.deriv", {}},    {"aia3_from_aaia.deriv", {}},
                                    {"box_s5_from_gperm.deriv", {}}, {"inclbox_from_gperm.deriv", {}}, {"aaia_from_gperm.deriv", {}}};
  std::size_t accepted = 0, mutants = 0, escaped = 0;
  std::string notes;
  for (const auto& r : replays) {
    std::ostringstream out, err;
    const int code = cli::run({"prove", fixture(r.file)}, out, err);
    const auto d = axioms::parse_derivation(slurp(fixture(r.file)));
    if (code == 0 && (!r.lines || d.lines.size() == *r.lines))
      ++accepted;
    else
      notes += " " + r.file + " not accepted" + err.str();
    for (std::size_t k = 0; k < d.lines.size(); ++k) {
      auto negated = d;
      negated.lines[k].formula = neg(d.lines[k].formula);
      auto renamed = d;
      renamed.lines[k].formula = substitute(d.lines[k].formula, {{*atoms(d.lines[k].formula).begin(), atom("z")}});
      for (const auto* m : {&negated, &renamed}) {
        ++mutants;
        if (axioms::check(*m).accepted) {
          ++escaped;
          notes += " " + r.file + ":" + d.lines[k].label;
        }
      }
    }
  }
  return {accepted == replays.size() && escaped == 0,
          std::to_string(accepted) + "/" + std::to_string(replays.size()) + " fixtures accepted, " +
              std::to_string(mutants) + " mutants, " + std::to_string(escaped) + " accepted" + notes};
}

std::vector<Formula> product_corpus() {
  std::mt19937_64 rng(77);
  Vocabulary voc;
  std::vector<Formula> out;
  while (out.size() < 200) {
    const auto f = testsupport::random_formula(rng, 10, voc);
    if (agents(f) == std::set<Agent>{0, 1}) out.push_back(f);
  }
  return out;
}

Outcome criterion7() {
  const testsupport::ProductOracle product(3);
  solver::SolverConfig cfg;
  cfg.agent_universe = 2;
  std::size_t disagreements = 0, sat = 0;
  for (const auto& f : product_corpus()) {
    const bool s = solver::sat(f, cfg).verdict == solver::Verdict::Sat;
    if (s != product.satisfiable(f)) ++disagreements;
    sat += s;
  }
  return {disagreements == 0,
          "200 formulas (" + std::to_string(sat) + " SAT), " + std::to_string(disagreements) + " disagreements"};
}

Outcome criterion8() {
  std::size_t differing = 0;
  for (const auto& f : product_corpus()) {
    std::optional<solver::Verdict> first;
    for (Agent n : {2u, 3u, 4u}) {
      solver::SolverConfig cfg;
      cfg.agent_universe = n;
      const auto v = solver::sat(f, cfg).verdict;
      if (!first) first = v;
      else if (*first != v) {
        ++differing;
        break;
      }
    }
  }
  return {differing == 0, "200 formulas at 2, 3 and 4 agents, " + std::to_string(differing) + " with differing verdicts"};
}

Outcome criterion9() {
  Vocabulary voc;
  voc.agents = {0};
  testsupport::FormulaEnumerator gen(voc);
  solver::SolverConfig cfg;
  cfg.agent_universe = 1;
  const auto cap = solver::oracle_world_cap();
  std::size_t count = 0, sat = 0, violations = 0, misses = 0, largest = 0;
  std::string first;
  gen.for_each_up_to(10, [&](const Formula& f) {
    ++count;
    if (solver::oracle(f, cap, cfg).verdict != solver::Verdict::Sat) return;
    ++sat;
    try {
      const auto r = solver::sat_single_agent(f, cfg);
      if (r.verdict != solver::Verdict::Sat) {
        ++misses;
        if (first.empty()) first = print(f, PrintStyle::Sugared) + " not found";
        return;
      }
      largest = std::max(largest, r.stats.witness_worlds);
    } catch (const solver::SolverError& e) {
      if (e.kind() != solver::SolverError::Kind::BoundViolation) throw;
      ++violations;
      if (first.empty()) first = e.what();
    }
  });
  return {violations == 0 && misses == 0,
          std::to_string(count) + " formulas, " + std::to_string(sat) + " SAT within " + std::to_string(cap) +
              " worlds, " + std::to_string(violations) + " bound violations, " + std::to_string(misses) +
              " missed, largest witness " + std::to_string(largest) + " worlds" + (first.empty() ? "" : "; " + first)};
}

}  // namespace

int main() {
  report(1, "length function", 1, criterion1);
  report(2, "axiom validity sweep", 300, criterion2);
  report(3, "filtration bound", 60, criterion3);
  report(4, "solver and oracle agree", 1800, criterion4);
  report(5, "translations preserve satisfiability", 600, criterion5);
  report(6, "derivation replays", 10, criterion6);
  report(7, "product cross-check", 600, criterion7);
  report(8, "conservative extension", 600, criterion8);
  report(9, "single-agent quadratic bound", 600, criterion9);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
