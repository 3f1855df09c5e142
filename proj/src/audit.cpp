#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "stitkit/axioms.hpp"
#include "stitkit/btac.hpp"
#include "stitkit/kripke.hpp"

namespace stitkit::axioms {

std::string to_string(ModelSource s) { return s == ModelSource::Btac ? "btac" : "kripke"; }

std::vector<Formula> default_grid() {
  static const char* texts[] = {
      "p",         "q",           "~p",          "(p & q)",   "(p | q)",         "(p -> q)",    "[0]p",
      "[1]p",      "[2]q",        "[]p",         "<>q",       "<0>p",            "<1>q",        "([0]p & q)",
      "([1]q | p)", "[0][1]p",     "<>[2]p",      "(p <-> q)", "[1]~p",           "(<0>q & ~p)",
  };
  std::vector<Formula> out;
  for (const char* t : texts) out.push_back(parse(t));
  return out;
}

namespace {

using Mask = std::uint32_t;

// What truth at one moment (or in one generated class) depends on.
struct Structure {
  std::size_t n = 0;
  std::vector<Mask> box_cells;
  std::vector<std::vector<Mask>> agent_cells;  // agents 0..A-1; later agents behave like the box
  // Origin, for reporting.
  std::optional<btac::BtacModel> btac_frame;
  btac::MomentId moment = 0;
  std::vector<btac::HistoryId> through;
  std::optional<kripke::KripkeModel> kripke_frame;

  Mask full() const { return n == 32 ? ~Mask{0} : (Mask{1} << n) - 1; }
  const std::vector<Mask>& cells(Agent i) const { return i < agent_cells.size() ? agent_cells[i] : box_cells; }
};

std::vector<Mask> sorted(std::vector<Mask> v) {
  std::sort(v.begin(), v.end());
  return v;
}

Mask necessity(const std::vector<Mask>& cells, Mask m) {
  Mask out = 0;
  for (Mask c : cells)
    if ((c & ~m) == 0) out |= c;
  return out;
}

// Post-order program over the subformulas, atoms read from an environment.
class Program {
 public:
  explicit Program(const Formula& f, const std::vector<std::string>& env_names) {
    const auto sf = subformulas(f);
    std::unordered_map<Formula, int> index;
    for (const auto& s : sf) {
      Step st;
      st.op = s.op();
      switch (s.op()) {
        case Op::Atom: {
          auto it = std::find(env_names.begin(), env_names.end(), s.name());
          st.a = it == env_names.end() ? -1 : static_cast<int>(it - env_names.begin());
          break;
        }
        case Op::And:
          st.a = index.at(s.lhs());
          st.b = index.at(s.rhs());
          break;
        case Op::Cstit:
        case Op::Dstit:
          st.agent = s.agent();
          st.a = index.at(s.body());
          break;
        default: st.a = index.at(s.body()); break;
      }
      index.emplace(s, static_cast<int>(steps_.size()));
      steps_.push_back(st);
    }
    scratch_.resize(steps_.size());
  }

  Mask run(const Structure& s, const Mask* env) {
    const Mask full = s.full();
    for (std::size_t x = 0; x < steps_.size(); ++x) {
      const Step& st = steps_[x];
      Mask& out = scratch_[x];
      switch (st.op) {
        case Op::Atom: out = st.a < 0 ? 0 : env[st.a]; break;
        case Op::Not: out = full & ~scratch_[st.a]; break;
        case Op::And: out = scratch_[st.a] & scratch_[st.b]; break;
        case Op::Box: out = necessity(s.box_cells, scratch_[st.a]); break;
        case Op::Cstit: out = necessity(s.cells(st.agent), scratch_[st.a]); break;
        case Op::Dstit:
          out = necessity(s.cells(st.agent), scratch_[st.a]) & ~necessity(s.box_cells, scratch_[st.a]) & full;
          break;
      }
    }
    return scratch_.back();
  }

 private:
  struct Step {
    Op op = Op::Atom;
    int a = -1, b = -1;
    Agent agent = 0;
  };
  std::vector<Step> steps_;
  std::vector<Mask> scratch_;
};

std::vector<Structure> btac_structures(const AuditBounds& bounds) {
  std::vector<Structure> out;
  std::set<std::vector<std::vector<Mask>>> seen;
  btac::EnumerationBounds eb;
  eb.max_moments = bounds.max_moments;
  eb.max_histories = bounds.max_histories;
  eb.agent_count = bounds.agents;
  btac::enumerate_frames(eb, [&](const btac::BtacModel& m) {
    for (btac::MomentId w = 0; w < m.moment_count(); ++w) {
      const auto& through = m.histories_through(w);
      Structure s;
      s.n = through.size();
      if (s.n > 16) throw AxiomError("audit structure too large");
      s.box_cells = {s.full()};
      std::vector<std::vector<Mask>> key{{static_cast<Mask>(s.n)}};
      for (Agent i = 0; i < bounds.agents; ++i) {
        std::vector<Mask> cells;
        for (const auto& cell : m.choice(i, w)) {
          Mask c = 0;
          for (auto h : cell) c |= Mask{1} << (std::find(through.begin(), through.end(), h) - through.begin());
          cells.push_back(c);
        }
        s.agent_cells.push_back(sorted(cells));
        key.push_back(s.agent_cells.back());
      }
      if (!seen.insert(key).second) continue;
      s.btac_frame = m;
      s.moment = w;
      s.through = through;
      out.push_back(std::move(s));
    }
    return true;
  });
  return out;
}

std::vector<Structure> kripke_structures(const AuditBounds& bounds) {
  std::vector<Structure> out;
  std::set<std::vector<std::vector<Mask>>> seen;
  auto cells_of = [](const kripke::Relation& r) {
    auto p = r.classes();
    if (!p) throw std::logic_error("relation is not an equivalence");
    std::vector<Mask> cells(p->block_count(), 0);
    for (std::size_t w = 0; w < p->size(); ++w) cells[p->block(w)] |= Mask{1} << w;
    return sorted(cells);
  };
  kripke::enumerate_frames(bounds.max_worlds, bounds.agents, bounds.agents, [&](const kripke::KripkeModel& m) {
    Structure s;
    s.n = m.size();
    s.box_cells = cells_of(m.box_relation());
    std::vector<std::vector<Mask>> key{{static_cast<Mask>(s.n)}, s.box_cells};
    for (Agent i = 0; i < bounds.agents; ++i) {
      s.agent_cells.push_back(cells_of(m.relation(i)));
      key.push_back(s.agent_cells.back());
    }
    if (!seen.insert(key).second) return true;
    s.kripke_frame = m;
    out.push_back(std::move(s));
    return true;
  });
  return out;
}

constexpr std::size_t kMaxValuationsPerStructure = 1u << 16;

}  // namespace

AuditReport semantic_audit(const std::vector<Schema>& schemas, const std::vector<Formula>& grid, ModelSource source,
                           const AuditBounds& bounds, std::size_t max_counterexamples) {
  if (grid.empty()) throw AxiomError("empty instantiation grid");
  AuditReport report;
  report.schemas = schemas.size();

  std::set<std::string> grid_atoms;
  for (const auto& g : grid)
    for (const auto& a : atoms(g)) grid_atoms.insert(a);
  const std::vector<std::string> atom_names(grid_atoms.begin(), grid_atoms.end());

  struct Template {
    const Schema* schema;
    std::vector<std::string> slot_names;
    std::unique_ptr<Program> program;
  };
  std::vector<Template> templates;
  for (const auto& s : schemas) {
    Template t;
    t.schema = &s;
    t.slot_names = slots(s);
    if (t.slot_names.size() > 4) throw AxiomError("audit supports at most four slots");
    Bindings b;
    std::vector<std::string> env;
    for (std::size_t j = 0; j < t.slot_names.size(); ++j) {
      env.push_back("_slot" + std::to_string(j));
      b.emplace(t.slot_names[j], atom(env.back()));
    }
    Formula tf = instantiate(s, b);
    if (source == ModelSource::Kripke)
      for (auto i : agents(tf))
        if (i >= bounds.agents) throw AxiomError("schema " + describe(s) + " mentions an agent outside the Kripke universe");
    t.program = std::make_unique<Program>(tf, env);
    std::size_t count = 1;
    for (std::size_t j = 0; j < t.slot_names.size(); ++j) count *= grid.size();
    report.instances += count;
    templates.push_back(std::move(t));
  }
  std::vector<Program> grid_programs;
  for (const auto& g : grid) grid_programs.emplace_back(g, atom_names);

  const auto structures = source == ModelSource::Btac ? btac_structures(bounds) : kripke_structures(bounds);
  report.structures = structures.size();

  for (const auto& s : structures) {
    const Mask full = s.full();
    const std::uint64_t per_atom = std::uint64_t{1} << s.n;
    std::uint64_t valuations = 1;
    for (std::size_t a = 0; a < atom_names.size(); ++a) {
      valuations *= per_atom;
      if (valuations > kMaxValuationsPerStructure) throw AxiomError("audit valuation space too large");
    }
    std::vector<std::unordered_set<std::uint64_t>> done(templates.size());
    std::vector<Mask> env(atom_names.size()), ext(grid.size());
    for (std::uint64_t code = 0; code < valuations; ++code) {
      std::uint64_t rest = code;
      for (auto& e : env) {
        e = static_cast<Mask>(rest % per_atom);
        rest /= per_atom;
      }
      for (std::size_t g = 0; g < grid.size(); ++g) ext[g] = grid_programs[g].run(s, env.data());
      std::vector<Mask> distinct(ext.begin(), ext.end());
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

      for (std::size_t t = 0; t < templates.size(); ++t) {
        auto& tpl = templates[t];
        const std::size_t arity = tpl.slot_names.size();
        std::vector<std::size_t> pick(arity, 0);
        std::vector<Mask> slot_masks(arity);
        while (true) {
          std::uint64_t key = 0;
          for (std::size_t j = 0; j < arity; ++j) {
            slot_masks[j] = distinct[pick[j]];
            key = key << 16 | slot_masks[j];
          }
          if (done[t].insert(key).second) {
            ++report.evaluations;
            Mask truth = tpl.program->run(s, slot_masks.data());
            if (truth != full) ++report.failures;
            if (truth != full && report.counterexamples.size() < max_counterexamples) {
              Bindings b;
              for (std::size_t j = 0; j < arity; ++j) {
                auto g = std::find(ext.begin(), ext.end(), slot_masks[j]) - ext.begin();
                b.emplace(tpl.slot_names[j], grid[g]);
              }
              Counterexample ce;
              ce.schema = describe(*tpl.schema);
              ce.instance = instantiate(*tpl.schema, b);
              const std::size_t pos = static_cast<std::size_t>(__builtin_ctz(full & ~truth));
              if (s.btac_frame) {
                btac::BtacModel model = *s.btac_frame;
                for (std::size_t a = 0; a < atom_names.size(); ++a)
                  for (std::size_t h = 0; h < s.n; ++h)
                    if (env[a] >> h & 1) model.add_valuation(atom_names[a], s.moment, s.through[h]);
                const btac::Index idx{s.moment, s.through[pos]};
                if (btac::eval(model, idx, ce.instance))
                  throw std::logic_error("audit counterexample not confirmed by the BT+AC evaluator");
                ce.model = btac::write_model(model);
                ce.index = model.moments()[s.moment].name + "/" + model.history_name(s.through[pos]);
              } else {
                kripke::KripkeModel model = *s.kripke_frame;
                for (std::size_t a = 0; a < atom_names.size(); ++a) {
                  std::vector<bool> e(s.n);
                  for (std::size_t w = 0; w < s.n; ++w) e[w] = env[a] >> w & 1;
                  model.valuation[atom_names[a]] = e;
                }
                if (kripke::mc(model, pos, ce.instance))
                  throw std::logic_error("audit counterexample not confirmed by the Kripke checker");
                ce.model = kripke::write_model(model);
                ce.index = model.worlds[pos];
              }
              report.counterexamples.push_back(std::move(ce));
            }
          }
          std::size_t j = arity;
          bool finished = true;
          while (j > 0) {
            --j;
            if (++pick[j] < distinct.size()) {
              finished = false;
              break;
            }
            pick[j] = 0;
          }
          if (finished) break;
        }
      }
    }
  }
  return report;
}

}  // namespace stitkit::axioms
