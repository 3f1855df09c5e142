#include "stitkit/kripke.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace stitkit::kripke {

Relation Relation::identity(std::size_t n) {
  Relation r(n);
  for (World w = 0; w < n; ++w) r.insert(w, w);
  return r;
}

Relation Relation::universal(std::size_t n) {
  Relation r(n);
  std::fill(r.bits_.begin(), r.bits_.end(), 1);
  return r;
}

Relation Relation::from_partition(const Partition& p) {
  Relation r(p.size());
  for (World w = 0; w < p.size(); ++w)
    for (World v = 0; v < p.size(); ++v)
      if (p.same(w, v)) r.insert(w, v);
  return r;
}

Relation Relation::then(const Relation& other) const {
  Relation r(n_);
  for (World w = 0; w < n_; ++w)
    for (World u = 0; u < n_; ++u) {
      if (!contains(w, u)) continue;
      for (World v = 0; v < n_; ++v)
        if (other.contains(u, v)) r.insert(w, v);
    }
  return r;
}

Relation Relation::united(const Relation& other) const {
  Relation r(n_);
  for (std::size_t k = 0; k < bits_.size(); ++k) r.bits_[k] = bits_[k] | other.bits_[k];
  return r;
}

Relation Relation::reflexive_transitive_closure() const {
  Relation r = united(identity(n_));
  for (World k = 0; k < n_; ++k)
    for (World w = 0; w < n_; ++w) {
      if (!r.contains(w, k)) continue;
      for (World v = 0; v < n_; ++v)
        if (r.contains(k, v)) r.insert(w, v);
    }
  return r;
}

Relation Relation::restrict(const std::vector<World>& keep) const {
  Relation r(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      if (contains(keep[a], keep[b])) r.insert(a, b);
  return r;
}

bool Relation::subset_of(const Relation& other) const {
  if (other.n_ != n_) return false;
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (bits_[k] && !other.bits_[k]) return false;
  return true;
}

bool Relation::reflexive() const {
  for (World w = 0; w < n_; ++w)
    if (!contains(w, w)) return false;
  return true;
}

bool Relation::symmetric() const {
  for (World w = 0; w < n_; ++w)
    for (World v = w + 1; v < n_; ++v)
      if (contains(w, v) != contains(v, w)) return false;
  return true;
}

bool Relation::transitive() const {
  for (World w = 0; w < n_; ++w)
    for (World u = 0; u < n_; ++u) {
      if (!contains(w, u)) continue;
      for (World v = 0; v < n_; ++v)
        if (contains(u, v) && !contains(w, v)) return false;
    }
  return true;
}

std::optional<Partition> Relation::classes() const {
  if (!equivalence()) return std::nullopt;
  std::vector<std::uint32_t> block(n_, UINT32_MAX);
  std::uint32_t next = 0;
  for (World w = 0; w < n_; ++w) {
    if (block[w] != UINT32_MAX) continue;
    for (World v = w; v < n_; ++v)
      if (contains(w, v)) block[v] = next;
    ++next;
  }
  return Partition(std::move(block));
}

// ---------------------------------------------------------------------------

std::optional<World> KripkeModel::find_world(const std::string& name) const {
  auto it = std::find(worlds.begin(), worlds.end(), name);
  if (it == worlds.end()) return std::nullopt;
  return static_cast<World>(it - worlds.begin());
}

bool KripkeModel::holds(const std::string& atom, World w) const {
  auto it = valuation.find(atom);
  return it != valuation.end() && w < it->second.size() && it->second[w];
}

Relation KripkeModel::moment_relation() const {
  if (box) return *box;
  Relation r = Relation::identity(size());
  for (const auto& [i, rel] : relations) r = r.united(rel);
  return r.reflexive_transitive_closure();
}

Relation KripkeModel::relation(Agent i) const {
  auto it = relations.find(i);
  return it != relations.end() ? it->second : moment_relation();
}

Relation KripkeModel::box_relation() const {
  if (agent_universe >= 2) return relation(1).then(relation(0));
  return moment_relation();
}

namespace {

// Agents that need to be examined individually: every stored one, plus one padded stand-in.
std::vector<Agent> representative_agents(const KripkeModel& m) {
  std::vector<Agent> out;
  for (const auto& [i, rel] : m.relations) out.push_back(i);
  for (Agent i = 0; i < m.agent_universe; ++i)
    if (!m.relations.count(i)) {
      out.push_back(i);
      break;
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t padded_count(const KripkeModel& m) {
  std::size_t stored_in_range = 0;
  for (const auto& [i, rel] : m.relations)
    if (i < m.agent_universe) ++stored_in_range;
  return m.agent_universe - stored_in_range;
}

}  // namespace

std::vector<GppViolation> check_gpp(const KripkeModel& m) {
  const std::size_t n = m.size();
  for (const auto& [i, rel] : m.relations)
    if (rel.size() != n || !rel.equivalence())
      throw ModelError("relation of agent " + std::to_string(i) + " is not an equivalence relation");

  const auto reps = representative_agents(m);
  const std::size_t padded = padded_count(m);
  const Relation moment = m.moment_relation();

  std::map<Agent, Relation> rel;
  for (auto a : reps) rel.emplace(a, m.relation(a));

  // meet[n] = intersection of R_i over every agent i other than n.
  std::map<Agent, Relation> meet;
  for (auto a : reps) {
    Relation acc = Relation::universal(n);
    auto intersect = [&](const Relation& r) {
      Relation next(n);
      for (World w = 0; w < n; ++w)
        for (World v = 0; v < n; ++v)
          if (acc.contains(w, v) && r.contains(w, v)) next.insert(w, v);
      acc = std::move(next);
    };
    for (const auto& [i, r] : m.relations)
      if (i != a) intersect(r);
    std::size_t other_padded = padded - (m.relations.count(a) ? 0 : 1);
    if (other_padded > 0) intersect(moment);
    meet.emplace(a, std::move(acc));
  }

  std::map<std::pair<Agent, Agent>, Relation> comp;
  for (auto l : reps)
    for (auto mm : reps) comp.emplace(std::make_pair(l, mm), rel.at(l).then(rel.at(mm)));

  std::vector<GppViolation> out;
  for (World w = 0; w < n; ++w)
    for (World v = 0; v < n; ++v)
      for (auto l : reps)
        for (auto mm : reps) {
          if (!comp.at({l, mm}).contains(w, v)) continue;
          for (auto nn : reps) {
            const Relation& rn = rel.at(nn);
            const Relation& rest = meet.at(nn);
            bool found = false;
            for (World u = 0; u < n && !found; ++u) found = rn.contains(w, u) && rest.contains(u, v);
            if (!found) out.push_back({w, v, l, mm, nn});
          }
        }
  return out;
}

std::vector<Violation> validate(const KripkeModel& m) {
  std::vector<Violation> out;
  const std::size_t n = m.size();
  if (n == 0) out.push_back({"nonempty", "model has no worlds"});
  if (m.agent_universe < 1) out.push_back({"agent universe", "agent_universe must be at least 1"});
  {
    std::set<std::string> names(m.worlds.begin(), m.worlds.end());
    if (names.size() != n) out.push_back({"world names", "world names are not unique"});
  }
  for (const auto& [atom, ext] : m.valuation)
    if (ext.size() != n) out.push_back({"valuation", "extension of " + atom + " has the wrong size"});
  bool equivalences = true;
  for (const auto& [i, rel] : m.relations) {
    if (i >= m.agent_universe)
      out.push_back({"agent universe", "agent " + std::to_string(i) + " is outside the agent universe"});
    if (rel.size() != n || !rel.equivalence()) {
      out.push_back({"equivalence", "relation of agent " + std::to_string(i) + " is not an equivalence"});
      equivalences = false;
    }
  }
  if (m.box) {
    if (m.box->size() != n || !m.box->equivalence()) {
      out.push_back({"equivalence", "box relation is not an equivalence"});
      equivalences = false;
    } else {
      for (const auto& [i, rel] : m.relations)
        if (rel.size() == n && !rel.subset_of(*m.box))
          out.push_back({"box inclusion", "relation of agent " + std::to_string(i) +
                                              " is not contained in the box relation"});
    }
  }
  if (!equivalences || !out.empty()) return out;
  if (m.agent_universe >= 2 && !(m.box_relation() == m.moment_relation()))
    out.push_back({"box definition", "R_1 then R_0 differs from the historic-necessity relation"});
  for (const auto& g : check_gpp(m)) {
    out.push_back({"gpp", "w=" + m.worlds[g.w] + " v=" + m.worlds[g.v] + " l=" + std::to_string(g.l) +
                              " m=" + std::to_string(g.m) + " n=" + std::to_string(g.n)});
    if (out.size() >= 32) break;
  }
  return out;
}

// ---------------------------------------------------------------------------

Checker::Checker(const KripkeModel& m) : model_(&m), n_(m.size()), box_(m.box_relation()) {}

const Relation& Checker::agent_relation(Agent i) const {
  auto it = agent_cache_.find(i);
  if (it == agent_cache_.end()) it = agent_cache_.emplace(i, model_->relation(i)).first;
  return it->second;
}

namespace {

using Ext = std::vector<char>;

Ext necessity(const Relation& r, const Ext& body) {
  const std::size_t n = r.size();
  Ext out(n, 1);
  for (World w = 0; w < n; ++w)
    for (World v = 0; v < n; ++v)
      if (r.contains(w, v) && !body[v]) {
        out[w] = 0;
        break;
      }
  return out;
}

}  // namespace

std::vector<bool> Checker::extension(const Formula& f) const {
  std::unordered_map<Formula, Ext> ext;
  for (const auto& g : subformulas(f)) {
    Ext e(n_, 0);
    switch (g.op()) {
      case Op::Atom: {
        auto it = model_->valuation.find(g.name());
        if (it != model_->valuation.end())
          for (World w = 0; w < n_ && w < it->second.size(); ++w) e[w] = it->second[w];
        break;
      }
      case Op::Not: {
        const Ext& b = ext.at(g.body());
        for (World w = 0; w < n_; ++w) e[w] = !b[w];
        break;
      }
      case Op::And: {
        const Ext& a = ext.at(g.lhs());
        const Ext& b = ext.at(g.rhs());
        for (World w = 0; w < n_; ++w) e[w] = a[w] && b[w];
        break;
      }
      case Op::Cstit:
        e = necessity(agent_relation(g.agent()), ext.at(g.body()));
        break;
      case Op::Box:
        e = necessity(box_, ext.at(g.body()));
        break;
      case Op::Dstit: {
        const Ext& b = ext.at(g.body());
        Ext act = necessity(agent_relation(g.agent()), b);
        Ext settled = necessity(box_, b);
        for (World w = 0; w < n_; ++w) e[w] = act[w] && !settled[w];
        break;
      }
    }
    ext.emplace(g, std::move(e));
  }
  const Ext& top = ext.at(f);
  return std::vector<bool>(top.begin(), top.end());
}

bool Checker::holds(World w, const Formula& f) const {
  if (w >= n_) throw ModelError("unknown world " + std::to_string(w));
  return extension(f)[w];
}

bool mc(const KripkeModel& m, World w, const Formula& f) { return Checker(m).holds(w, f); }

bool mc(const KripkeModel& m, const std::string& world, const Formula& f) {
  auto w = m.find_world(world);
  if (!w) throw ModelError("unknown world '" + world + "'");
  return mc(m, *w, f);
}

std::vector<bool> extension(const KripkeModel& m, const Formula& f) { return Checker(m).extension(f); }

// ---------------------------------------------------------------------------

namespace {

KripkeModel restrict_model(const KripkeModel& m, const std::vector<World>& keep) {
  KripkeModel out;
  out.agent_universe = m.agent_universe;
  for (auto w : keep) out.worlds.push_back(m.worlds[w]);
  for (const auto& [i, rel] : m.relations) out.relations.emplace(i, rel.restrict(keep));
  if (m.box) out.box = m.box->restrict(keep);
  for (const auto& [atom, ext] : m.valuation) {
    std::vector<bool> e;
    for (auto w : keep) e.push_back(w < ext.size() && ext[w]);
    out.valuation.emplace(atom, std::move(e));
  }
  return out;
}

}  // namespace

KripkeModel generated_submodel(const KripkeModel& m, World w) {
  if (w >= m.size()) throw ModelError("unknown world " + std::to_string(w));
  const Relation b = m.box_relation();
  std::vector<World> keep;
  for (World v = 0; v < m.size(); ++v)
    if (v == w || b.contains(w, v)) keep.push_back(v);
  return restrict_model(m, keep);
}

KripkeModel filtrate(const KripkeModel& m, const Formula& f) {
  if (auto problems = validate(m); !problems.empty())
    throw ModelError("filtrate needs a valid GPP model: " + problems.front().condition + " (" +
                     problems.front().detail + ")");
  if (!(m.box_relation() == Relation::universal(m.size())))
    throw ModelError("filtrate needs a generated model (box must be universal)");

  const Formula g = expand_dstit(f);
  const auto sf = subformulas(g);
  Checker checker(m);
  std::vector<std::vector<bool>> ext;
  ext.reserve(sf.size());
  for (const auto& s : sf) ext.push_back(checker.extension(s));

  std::map<std::vector<bool>, std::size_t> class_of_signature;
  std::vector<std::size_t> cls(m.size());
  std::vector<World> reps;
  for (World w = 0; w < m.size(); ++w) {
    std::vector<bool> sig(sf.size());
    for (std::size_t k = 0; k < sf.size(); ++k) sig[k] = ext[k][w];
    auto [it, fresh] = class_of_signature.emplace(std::move(sig), reps.size());
    if (fresh) reps.push_back(w);
    cls[w] = it->second;
  }
  const std::size_t count = reps.size();
  const std::size_t len = length(f);
  if (len < 63 && count > (std::size_t{1} << len))
    throw std::logic_error("filtration produced more than 2^length classes");

  KripkeModel out;
  out.agent_universe = m.agent_universe;
  for (auto w : reps) out.worlds.push_back(m.worlds[w]);
  out.box = Relation::universal(count);
  for (auto i : agents(g)) {
    Relation r(count);
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = 0; b < count; ++b) {
        bool agree = true;
        for (std::size_t k = 0; k < sf.size() && agree; ++k)
          if (sf[k].op() == Op::Cstit && sf[k].agent() == i) agree = ext[k][reps[a]] == ext[k][reps[b]];
        if (agree) r.insert(a, b);
      }
    out.relations.emplace(i, std::move(r));
  }
  for (std::size_t k = 0; k < sf.size(); ++k)
    if (sf[k].op() == Op::Atom) {
      std::vector<bool> e(count);
      for (std::size_t c = 0; c < count; ++c) e[c] = ext[k][reps[c]];
      out.valuation.emplace(sf[k].name(), std::move(e));
    }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<World> MomentModel::find_world(const std::string& name) const {
  auto it = std::find(worlds.begin(), worlds.end(), name);
  if (it == worlds.end()) return std::nullopt;
  return static_cast<World>(it - worlds.begin());
}

std::optional<std::vector<std::size_t>> rectangularity_violation(const MomentModel& m) {
  std::vector<const Partition*> parts;
  for (const auto& [i, p] : m.partitions) {
    if (p.size() != m.size()) throw ModelError("partition of agent " + std::to_string(i) + " has the wrong size");
    parts.push_back(&p);
  }
  std::set<std::vector<std::size_t>> present;
  for (World w = 0; w < m.size(); ++w) {
    std::vector<std::size_t> t;
    for (auto* p : parts) t.push_back(p->block(w));
    present.insert(std::move(t));
  }
  std::vector<std::size_t> t(parts.size(), 0);
  if (m.size() == 0) return t;
  // Odometer over every cell tuple, lexicographic.
  while (true) {
    if (!present.count(t)) return t;
    std::size_t k = parts.size();
    while (k > 0) {
      --k;
      if (++t[k] < parts[k]->block_count()) break;
      t[k] = 0;
      if (k == 0) return std::nullopt;
    }
    if (parts.empty()) return std::nullopt;
  }
}

KripkeModel moment_to_kripke(const MomentModel& m) {
  if (m.size() == 0) throw ModelError("moment model has no worlds");
  if (auto bad = rectangularity_violation(m)) {
    std::string detail;
    std::size_t k = 0;
    for (const auto& [i, p] : m.partitions) {
      if (!detail.empty()) detail += ", ";
      detail += "agent " + std::to_string(i) + " cell " + std::to_string((*bad)[k++] + 1);
    }
    throw ModelError("rectangularity violation: empty intersection of " + detail);
  }
  KripkeModel out;
  out.worlds = m.worlds;
  out.agent_universe = m.agent_universe;
  for (const auto& [i, p] : m.partitions) out.relations.emplace(i, Relation::from_partition(p));
  out.box = Relation::universal(m.size());
  out.valuation = m.valuation;
  return out;
}

bool mc(const MomentModel& m, World w, const Formula& f) { return mc(moment_to_kripke(m), w, f); }

// ---------------------------------------------------------------------------

void enumerate_frames(std::size_t max_worlds, std::size_t stored, Agent universe,
                      const std::function<bool(const KripkeModel&)>& visit) {
  if (universe < 1) throw std::invalid_argument("agent universe must be at least 1");
  if (stored > universe) throw std::invalid_argument("more stored agents than the agent universe");
  for (std::size_t n = 1; n <= max_worlds; ++n) {
    std::vector<Partition> all;
    for_each_partition(n, [&](const Partition& p) {
      all.push_back(p);
      return true;
    });
    const bool explicit_box = universe == 1;
    std::vector<std::size_t> pick(stored + (explicit_box ? 1 : 0), 0);
    while (true) {
      KripkeModel m;
      m.agent_universe = universe;
      for (std::size_t w = 0; w < n; ++w) m.worlds.push_back("w" + std::to_string(w + 1));
      for (std::size_t i = 0; i < stored; ++i)
        m.relations.emplace(static_cast<Agent>(i), Relation::from_partition(all[pick[i]]));
      if (explicit_box) m.box = Relation::from_partition(all[pick.back()]);
      if (validate(m).empty() && !visit(m)) return;
      std::size_t k = pick.size();
      bool done = true;
      while (k > 0) {
        --k;
        if (++pick[k] < all.size()) {
          done = false;
          break;
        }
        pick[k] = 0;
      }
      if (done) break;
    }
  }
}

}  // namespace stitkit::kripke
