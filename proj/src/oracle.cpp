#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "stitkit/solver.hpp"

namespace stitkit::solver {

std::size_t oracle_world_cap() {
  constexpr std::size_t ceiling = 7;
  std::size_t cap = 5;
  if (const char* env = std::getenv("STITKIT_MAX_ORACLE")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) cap = static_cast<std::size_t>(v);
  }
  return std::min(cap, ceiling);
}

namespace {

using Mask = std::uint32_t;

// A frame reduced to what evaluation needs: cells per modality as world bitmasks.
struct Frame {
  std::size_t n = 0;
  std::vector<Mask> box_cells;
  std::map<Agent, std::vector<Mask>> agent_cells;
  std::vector<Partition> parts;  // agent partitions in key order; box last when explicit
};

std::vector<Mask> cells_of(const Partition& p) {
  std::vector<Mask> out(p.block_count(), 0);
  for (std::size_t w = 0; w < p.size(); ++w) out[p.block(w)] |= Mask{1} << w;
  return out;
}

Mask necessity(const std::vector<Mask>& cells, Mask m) {
  Mask out = 0;
  for (Mask c : cells)
    if ((c & ~m) == 0) out |= c;
  return out;
}

std::vector<Partition> permuted(const std::vector<Partition>& parts, const std::vector<std::size_t>& perm) {
  std::vector<Partition> out;
  out.reserve(parts.size());
  for (const auto& p : parts) {
    std::vector<std::uint32_t> b(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) b[perm[x]] = p.block(x);
    out.emplace_back(std::move(b));
  }
  return out;
}

std::vector<Partition> canonical(const std::vector<Partition>& parts, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Partition> best = parts;
  do {
    auto cand = permuted(parts, perm);
    if (cand < best) best = std::move(cand);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

const std::vector<Partition>& partitions_of(std::size_t n) {
  static std::map<std::size_t, std::vector<Partition>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Partition> all;
  for_each_partition(n, [&](const Partition& p) {
    all.push_back(p);
    return true;
  });
  return cache.emplace(n, std::move(all)).first->second;
}

// Calls visit on every tuple of partitions of n worlds, one per slot.
template <typename Visit>
void for_each_tuple(std::size_t n, std::size_t slots, Visit&& visit) {
  const auto& all = partitions_of(n);
  std::vector<std::size_t> pick(slots, 0);
  std::vector<Partition> tuple(slots);
  while (true) {
    for (std::size_t k = 0; k < slots; ++k) tuple[k] = all[pick[k]];
    visit(tuple);
    std::size_t k = slots;
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

constexpr std::uint64_t kMaxTuples = 4'000'000;

void guard_tuples(std::size_t n, std::size_t slots) {
  double total = 1;
  for (std::size_t k = 0; k < slots; ++k) total *= static_cast<double>(bell_number(n));
  if (total > static_cast<double>(kMaxTuples))
    throw SolverError(SolverError::Kind::CapExceeded, "oracle frame enumeration too large");
}

const std::vector<Frame>& moment_frames(std::size_t n, const std::vector<Agent>& occurring) {
  static std::map<std::pair<std::size_t, std::vector<Agent>>, std::vector<Frame>> cache;
  auto key = std::make_pair(n, occurring);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  guard_tuples(n, occurring.size());
  std::vector<Frame> frames;
  std::set<std::vector<Partition>> seen;
  for_each_tuple(n, occurring.size(), [&](const std::vector<Partition>& tuple) {
    kripke::MomentModel m;
    for (std::size_t w = 0; w < n; ++w) m.worlds.push_back("w" + std::to_string(w));
    for (std::size_t k = 0; k < occurring.size(); ++k) m.partitions.emplace(occurring[k], tuple[k]);
    if (kripke::rectangularity_violation(m)) return;
    if (n <= 5 && !seen.insert(canonical(tuple, n)).second) return;
    Frame f;
    f.n = n;
    f.box_cells = {static_cast<Mask>((Mask{1} << n) - 1)};
    for (std::size_t k = 0; k < occurring.size(); ++k) f.agent_cells.emplace(occurring[k], cells_of(tuple[k]));
    f.parts = tuple;
    frames.push_back(std::move(f));
  });
  return cache.emplace(key, std::move(frames)).first->second;
}

const std::vector<Frame>& kripke_frames(std::size_t n, const std::vector<Agent>& stored, Agent universe,
                                        const std::vector<Agent>& occurring) {
  static std::map<std::tuple<std::size_t, std::vector<Agent>, Agent, std::vector<Agent>>, std::vector<Frame>> cache;
  auto key = std::make_tuple(n, stored, universe, occurring);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const bool explicit_box = universe == 1;
  const std::size_t slots = stored.size() + (explicit_box ? 1 : 0);
  guard_tuples(n, slots);
  std::vector<Frame> frames;
  std::set<std::vector<Partition>> seen;
  for_each_tuple(n, slots, [&](const std::vector<Partition>& tuple) {
    if (n <= 5 && seen.count(canonical(tuple, n))) return;
    kripke::KripkeModel m;
    m.agent_universe = universe;
    for (std::size_t w = 0; w < n; ++w) m.worlds.push_back("w" + std::to_string(w));
    for (std::size_t k = 0; k < stored.size(); ++k) m.relations.emplace(stored[k], kripke::Relation::from_partition(tuple[k]));
    if (explicit_box) m.box = kripke::Relation::from_partition(tuple.back());
    if (!kripke::validate(m).empty()) return;
    if (n <= 5) seen.insert(canonical(tuple, n));
    Frame f;
    f.n = n;
    auto box_classes = m.box_relation().classes();
    if (!box_classes) return;
    f.box_cells = cells_of(*box_classes);
    for (Agent i : occurring) {
      auto cls = m.relation(i).classes();
      if (!cls) return;
      f.agent_cells.emplace(i, cells_of(*cls));
    }
    f.parts = tuple;
    frames.push_back(std::move(f));
  });
  return cache.emplace(key, std::move(frames)).first->second;
}

// Valuation search with interval (must-true, may-true) evaluation of every subformula.
class ValuationSearch {
 public:
  explicit ValuationSearch(const Formula& f) {
    const auto sf = subformulas(f);
    std::unordered_map<Formula, int> index;
    for (const auto& s : sf) index.emplace(s, static_cast<int>(index.size()));
    std::vector<std::string> names;
    for (const auto& s : sf)
      if (s.op() == Op::Atom) names.push_back(s.name());
    std::sort(names.begin(), names.end(), [](const std::string& x, const std::string& y) {
      bool fx = !x.empty() && x[0] == '_', fy = !y.empty() && y[0] == '_';
      if (fx != fy) return !fx;
      if (x.size() != y.size()) return x.size() < y.size();
      return x < y;
    });
    names.erase(std::unique(names.begin(), names.end()), names.end());
    atom_names_ = names;
    for (const auto& s : sf) {
      Node node;
      node.op = s.op();
      switch (s.op()) {
        case Op::Atom:
          node.atom = static_cast<int>(std::find(names.begin(), names.end(), s.name()) - names.begin());
          break;
        case Op::And:
          node.a = index.at(s.lhs());
          node.b = index.at(s.rhs());
          break;
        case Op::Cstit:
        case Op::Dstit:
          node.agent = s.agent();
          node.a = index.at(s.body());
          break;
        case Op::Not:
        case Op::Box:
          node.a = index.at(s.body());
          break;
      }
      nodes_.push_back(node);
    }
    lo_.resize(nodes_.size());
    hi_.resize(nodes_.size());
  }

  const std::vector<std::string>& atom_names() const { return atom_names_; }

  // Returns the atom extensions of a satisfying valuation, if any.
  std::optional<std::vector<Mask>> solve(const Frame& frame, std::uint64_t& explored) {
    frame_ = &frame;
    full_ = static_cast<Mask>((Mask{1} << frame.n) - 1);
    assign_.assign(atom_names_.size(), 0);
    assigned_ = 0;
    explored_ = &explored;
    if (go()) return assign_;
    return std::nullopt;
  }

 private:
  struct Node {
    Op op = Op::Atom;
    int a = -1, b = -1, atom = -1;
    Agent agent = 0;
  };
  std::vector<Node> nodes_;
  std::vector<std::string> atom_names_;
  std::vector<Mask> lo_, hi_, assign_;
  std::size_t assigned_ = 0;
  const Frame* frame_ = nullptr;
  Mask full_ = 0;
  std::uint64_t* explored_ = nullptr;

  void evaluate() {
    for (std::size_t x = 0; x < nodes_.size(); ++x) {
      const Node& n = nodes_[x];
      switch (n.op) {
        case Op::Atom:
          if (static_cast<std::size_t>(n.atom) < assigned_) {
            lo_[x] = hi_[x] = assign_[n.atom];
          } else {
            lo_[x] = 0;
            hi_[x] = full_;
          }
          break;
        case Op::Not:
          lo_[x] = full_ & ~hi_[n.a];
          hi_[x] = full_ & ~lo_[n.a];
          break;
        case Op::And:
          lo_[x] = lo_[n.a] & lo_[n.b];
          hi_[x] = hi_[n.a] & hi_[n.b];
          break;
        case Op::Box:
          lo_[x] = necessity(frame_->box_cells, lo_[n.a]);
          hi_[x] = necessity(frame_->box_cells, hi_[n.a]);
          break;
        case Op::Cstit: {
          const auto& cells = frame_->agent_cells.at(n.agent);
          lo_[x] = necessity(cells, lo_[n.a]);
          hi_[x] = necessity(cells, hi_[n.a]);
          break;
        }
        case Op::Dstit: {
          const auto& cells = frame_->agent_cells.at(n.agent);
          lo_[x] = necessity(cells, lo_[n.a]) & ~necessity(frame_->box_cells, hi_[n.a]) & full_;
          hi_[x] = necessity(cells, hi_[n.a]) & ~necessity(frame_->box_cells, lo_[n.a]) & full_;
          break;
        }
      }
    }
  }

  bool go() {
    evaluate();
    const Mask root_hi = hi_.back(), root_lo = lo_.back();
    if (root_hi == 0) return false;
    if (root_lo != 0 && assigned_ == atom_names_.size()) {
      ++*explored_;
      return true;
    }
    if (assigned_ == atom_names_.size()) {
      ++*explored_;
      return false;
    }
    const std::size_t k = assigned_++;
    for (Mask m = 0; m <= full_; ++m) {
      assign_[k] = m;
      if (go()) return true;
    }
    --assigned_;
    return false;
  }
};

kripke::MomentModel moment_witness(const Frame& frame, const std::vector<Agent>& occurring,
                                   const std::vector<std::string>& names, const std::vector<Mask>& ext,
                                   Agent universe) {
  kripke::MomentModel m;
  m.agent_universe = universe;
  for (std::size_t w = 0; w < frame.n; ++w) m.worlds.push_back("w" + std::to_string(w + 1));
  for (std::size_t k = 0; k < occurring.size(); ++k) m.partitions.emplace(occurring[k], frame.parts[k]);
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::vector<bool> e(frame.n);
    for (std::size_t w = 0; w < frame.n; ++w) e[w] = ext[a] >> w & 1;
    m.valuation.emplace(names[a], std::move(e));
  }
  return m;
}

}  // namespace

SatResult oracle(const Formula& f, std::size_t max_worlds, const SolverConfig& cfg) {
  if (cfg.agent_universe < 1) throw SolverError(SolverError::Kind::InvalidInput, "agent universe must be at least 1");
  for (auto i : agents(f))
    if (i >= cfg.agent_universe)
      throw SolverError(SolverError::Kind::InvalidInput,
                        "agent " + std::to_string(i) + " is outside the agent universe of size " +
                            std::to_string(cfg.agent_universe));
  if (max_worlds < 1) throw SolverError(SolverError::Kind::InvalidInput, "oracle needs max_worlds >= 1");
  if (max_worlds > oracle_world_cap())
    throw SolverError(SolverError::Kind::CapExceeded,
                      "oracle max_worlds " + std::to_string(max_worlds) + " exceeds the cap " +
                          std::to_string(oracle_world_cap()));
  if (length(f) > kOracleMaxLength) throw SolverError(SolverError::Kind::CapExceeded, "formula too long for the oracle");
  if (atoms(f).size() > kOracleMaxAtoms) throw SolverError(SolverError::Kind::CapExceeded, "too many atoms for the oracle");

  const auto agent_set = agents(f);
  const std::vector<Agent> occurring(agent_set.begin(), agent_set.end());
  std::set<Agent> stored_set(agent_set.begin(), agent_set.end());
  for (Agent i = 0; i < std::min<Agent>(cfg.agent_universe, 3); ++i) stored_set.insert(i);
  const std::vector<Agent> stored(stored_set.begin(), stored_set.end());

  ValuationSearch search(f);
  SatResult result;
  result.stats.engine = "oracle";
  result.stats.bound_exponent = length(f);
  result.stats.bound_used = max_worlds;

  std::optional<std::size_t> moment_size;
  for (std::size_t n = 1; n <= max_worlds && !moment_size; ++n) {
    for (const auto& frame : moment_frames(n, occurring)) {
      auto ext = search.solve(frame, result.stats.models_explored);
      if (!ext) continue;
      moment_size = n;
      auto model = moment_witness(frame, occurring, search.atom_names(), *ext, cfg.agent_universe);
      auto e = kripke::extension(kripke::moment_to_kripke(model), f);
      for (kripke::World w = 0; w < e.size(); ++w)
        if (e[w]) {
          result.witness_world = w;
          break;
        }
      if (!result.witness_world) throw std::logic_error("oracle witness failed independent model checking");
      result.stats.witness_worlds = model.size();
      result.witness = std::move(model);
      break;
    }
  }

  bool kripke_sat = false;
  for (std::size_t n = 1; n <= max_worlds && !kripke_sat; ++n)
    for (const auto& frame : kripke_frames(n, stored, cfg.agent_universe, occurring))
      if (search.solve(frame, result.stats.models_explored)) {
        kripke_sat = true;
        break;
      }
  result.stats.kripke_class_verdict = kripke_sat ? Verdict::Sat : Verdict::Unsat;
  result.verdict = (moment_size || kripke_sat) ? Verdict::Sat : Verdict::Unsat;
  result.stats.exhausted = !moment_size && !kripke_sat;
  return result;
}

}  // namespace stitkit::solver
