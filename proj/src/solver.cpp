#include "stitkit/solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace stitkit::solver {

std::string to_string(Verdict v) { return v == Verdict::Sat ? "SAT" : "UNSAT"; }
std::string to_string(Engine e) { return e == Engine::Search ? "search" : "oracle"; }

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
  explicit Deadline(std::chrono::milliseconds budget)
      : active_(budget.count() > 0), end_(Clock::now() + budget) {}
  void check() const {
    if (!active_) return;
    thread_local unsigned counter = 0;
    if ((++counter & 1023u) != 0) return;
    if (Clock::now() > end_) throw SolverError(SolverError::Kind::Timeout, "solver timeout");
  }

 private:
  bool active_;
  Clock::time_point end_;
};

// Flattened subformula DAG of the dstit-free formula being solved.
struct Problem {
  std::vector<Op> op;
  std::vector<int> a, b;
  std::vector<int> atom_id, agent_pos, bit, box_id;
  std::vector<std::string> atom_names;
  std::vector<Agent> agents;
  std::vector<std::vector<int>> cstit_nodes;  // per agent position, indexed by bit
  std::vector<int> box_nodes;
  int root = 0;
  std::size_t size() const { return op.size(); }
};

Problem build_problem(const Formula& g) {
  Problem p;
  const auto sf = subformulas(g);
  std::unordered_map<Formula, int> index;
  for (const auto& s : sf) index.emplace(s, static_cast<int>(index.size()));
  std::set<Agent> ags;
  for (const auto& s : sf)
    if (s.op() == Op::Cstit) ags.insert(s.agent());
  p.agents.assign(ags.begin(), ags.end());
  p.cstit_nodes.resize(p.agents.size());
  std::map<std::string, int> atom_ids;
  for (std::size_t k = 0; k < sf.size(); ++k) {
    const auto& s = sf[k];
    p.op.push_back(s.op());
    p.a.push_back(-1);
    p.b.push_back(-1);
    p.atom_id.push_back(-1);
    p.agent_pos.push_back(-1);
    p.bit.push_back(-1);
    p.box_id.push_back(-1);
    switch (s.op()) {
      case Op::Atom: {
        auto [it, fresh] = atom_ids.emplace(s.name(), static_cast<int>(p.atom_names.size()));
        if (fresh) p.atom_names.push_back(s.name());
        p.atom_id[k] = it->second;
        break;
      }
      case Op::And:
        p.a[k] = index.at(s.lhs());
        p.b[k] = index.at(s.rhs());
        break;
      case Op::Cstit: {
        p.a[k] = index.at(s.body());
        auto pos = static_cast<int>(std::lower_bound(p.agents.begin(), p.agents.end(), s.agent()) - p.agents.begin());
        p.agent_pos[k] = pos;
        p.bit[k] = static_cast<int>(p.cstit_nodes[pos].size());
        p.cstit_nodes[pos].push_back(static_cast<int>(k));
        break;
      }
      case Op::Box:
        p.a[k] = index.at(s.body());
        p.box_id[k] = static_cast<int>(p.box_nodes.size());
        p.box_nodes.push_back(static_cast<int>(k));
        break;
      case Op::Not:
        p.a[k] = index.at(s.body());
        break;
      case Op::Dstit:
        throw std::logic_error("dstit must be expanded before solving");
    }
  }
  p.root = static_cast<int>(sf.size()) - 1;
  if (p.atom_names.size() > 62) throw SolverError(SolverError::Kind::CapExceeded, "too many atoms for the search engine");
  for (const auto& c : p.cstit_nodes)
    if (c.size() > 62) throw SolverError(SolverError::Kind::CapExceeded, "too many [i]-subformulas for one agent");
  return p;
}

// Worlds-to-be: assignments to every subformula that respect the T conditions for a fixed box set.
struct PointSet {
  std::size_t S = 0, k = 0, n = 0;
  std::vector<char> truth;
  std::vector<std::uint64_t> profile;
  std::vector<std::uint64_t> val;

  const char* row(std::size_t x) const { return truth.data() + x * S; }
  std::uint64_t prof(std::size_t x, std::size_t i) const { return profile[x * k + i]; }
};

constexpr std::size_t kMaxPoints = 1u << 21;

PointSet enumerate_points(const Problem& p, const std::vector<char>& B, const Deadline& deadline) {
  PointSet ps;
  ps.S = p.size();
  ps.k = p.agents.size();
  std::vector<char> t(ps.S, 0);
  std::vector<std::uint64_t> prof(ps.k, 0);
  std::uint64_t val = 0;
  std::function<void(std::size_t)> dfs = [&](std::size_t x) {
    deadline.check();
    if (x == ps.S) {
      if (ps.n >= kMaxPoints) throw SolverError(SolverError::Kind::CapExceeded, "point enumeration exceeded its cap");
      ps.truth.insert(ps.truth.end(), t.begin(), t.end());
      ps.profile.insert(ps.profile.end(), prof.begin(), prof.end());
      ps.val.push_back(val);
      ++ps.n;
      return;
    }
    switch (p.op[x]) {
      case Op::Atom: {
        const auto bitmask = std::uint64_t{1} << p.atom_id[x];
        t[x] = 0;
        dfs(x + 1);
        t[x] = 1;
        val |= bitmask;
        dfs(x + 1);
        val &= ~bitmask;
        return;
      }
      case Op::Not:
        t[x] = !t[p.a[x]];
        dfs(x + 1);
        return;
      case Op::And:
        t[x] = t[p.a[x]] && t[p.b[x]];
        dfs(x + 1);
        return;
      case Op::Box:
        t[x] = B[p.box_id[x]];
        if (t[x] && !t[p.a[x]]) return;
        dfs(x + 1);
        return;
      case Op::Cstit: {
        const auto bitmask = std::uint64_t{1} << p.bit[x];
        auto& pr = prof[p.agent_pos[x]];
        t[x] = 0;
        dfs(x + 1);
        if (t[p.a[x]]) {
          t[x] = 1;
          pr |= bitmask;
          dfs(x + 1);
          pr &= ~bitmask;
        }
        return;
      }
      case Op::Dstit:
        return;
    }
  };
  dfs(0);
  return ps;
}

// Box sets surviving three-valued pruning, in a fixed deterministic order.
class BoxCandidates {
 public:
  explicit BoxCandidates(const Problem& p) : p_(p) {
    // Outermost boxes first so top-level constraints are decided early.
    std::vector<int> depth(p.size(), std::numeric_limits<int>::max());
    depth[p.root] = 0;
    for (int x = p.root; x >= 0; --x) {
      if (depth[x] == std::numeric_limits<int>::max()) continue;
      for (int c : {p.a[x], p.b[x]})
        if (c >= 0) depth[c] = std::min(depth[c], depth[x] + 1);
    }
    for (std::size_t k = 0; k < p.box_nodes.size(); ++k) order_.push_back(static_cast<int>(k));
    std::stable_sort(order_.begin(), order_.end(), [&](int x, int y) {
      int dx = depth[p.box_nodes[x]], dy = depth[p.box_nodes[y]];
      if (dx != dy) return dx < dy;
      return p.box_nodes[x] > p.box_nodes[y];
    });
  }

  // Visits complete box sets; stops when visit returns false.
  void run(const Deadline& deadline, const std::function<bool(const std::vector<char>&)>& visit) {
    std::vector<signed char> state(p_.box_nodes.size(), -1);
    std::vector<char> full(p_.box_nodes.size(), 0);
    std::function<bool(std::size_t)> go = [&](std::size_t pos) -> bool {
      deadline.check();
      if (!viable(state)) return true;
      if (pos == order_.size()) {
        for (std::size_t k = 0; k < state.size(); ++k) full[k] = static_cast<char>(state[k]);
        return visit(full);
      }
      for (signed char v : {1, 0}) {
        state[order_[pos]] = v;
        if (!go(pos + 1)) return false;
      }
      state[order_[pos]] = -1;
      return true;
    };
    go(0);
  }

 private:
  const Problem& p_;
  std::vector<int> order_;

  // 0 false everywhere, 1 true everywhere, 2 unknown.
  bool viable(const std::vector<signed char>& state) const {
    std::vector<char> v(p_.size(), 2);
    for (std::size_t x = 0; x < p_.size(); ++x) {
      switch (p_.op[x]) {
        case Op::Atom: v[x] = 2; break;
        case Op::Not: v[x] = v[p_.a[x]] == 2 ? 2 : !v[p_.a[x]]; break;
        case Op::And: {
          char l = v[p_.a[x]], r = v[p_.b[x]];
          v[x] = (l == 0 || r == 0) ? 0 : (l == 1 && r == 1) ? 1 : 2;
          break;
        }
        case Op::Cstit: v[x] = v[p_.a[x]]; break;
        case Op::Box: {
          char body = v[p_.a[x]];
          signed char s = state[p_.box_id[x]];
          if (s == 1 && body == 0) return false;
          if (s == 0 && body == 1) return false;
          v[x] = s >= 0 ? static_cast<char>(s) : body;
          break;
        }
        case Op::Dstit: break;
      }
    }
    return v[p_.root] != 0;
  }
};

struct Family {
  std::vector<std::vector<char>> member;  // per agent, per local profile
};

class ProfileSearch {
 public:
  ProfileSearch(const Problem& p, const std::vector<char>& B, const PointSet& ps, const Deadline& deadline)
      : p_(p), B_(B), ps_(ps), deadline_(deadline), k_(p.agents.size()) {
    local_.assign(ps.n * k_, 0);
    profiles_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      std::set<std::uint64_t> codes;
      for (std::size_t x = 0; x < ps.n; ++x) codes.insert(ps.prof(x, i));
      profiles_[i].assign(codes.begin(), codes.end());
      for (std::size_t x = 0; x < ps.n; ++x)
        local_[x * k_ + i] = static_cast<std::uint32_t>(
            std::lower_bound(profiles_[i].begin(), profiles_[i].end(), ps.prof(x, i)) - profiles_[i].begin());
    }
    bucket_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      bucket_[i].resize(profiles_[i].size());
      for (std::size_t x = 0; x < ps.n; ++x) bucket_[i][loc(x, i)].push_back(x);
    }
  }

  std::uint64_t families() const { return families_; }

  std::optional<Family> solve() {
    Family fam;
    for (std::size_t i = 0; i < k_; ++i) fam.member.emplace_back(profiles_[i].size(), 1);
    if (!prune(fam)) return std::nullopt;
    if (k_ <= 1) {
      ++families_;
      if (global_ok(fam)) return fam;
      return std::nullopt;
    }
    std::vector<std::vector<std::uint32_t>> elems(k_);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::uint32_t e = 0; e < fam.member[i].size(); ++e)
        if (fam.member[i][e]) elems[i].push_back(e);
    for (std::size_t i = 0; i + 1 < k_; ++i)
      if (elems[i].size() > 40) throw SolverError(SolverError::Kind::CapExceeded, "too many agent profiles to search");
    Family trial = fam;
    std::optional<Family> found;
    choose(0, elems, fam, trial, found);
    return found;
  }

  std::vector<std::size_t> witness_points(const Family& fam) const {
    std::vector<std::size_t> chosen;
    std::vector<char> taken(ps_.n, 0);
    std::vector<std::set<std::uint32_t>> used(k_);
    auto take = [&](std::size_t x) {
      if (taken[x]) return;
      taken[x] = 1;
      chosen.push_back(x);
      for (std::size_t i = 0; i < k_; ++i) used[i].insert(loc(x, i));
    };
    auto within_used = [&](std::size_t x) {
      for (std::size_t i = 0; i < k_; ++i)
        if (!used[i].count(loc(x, i))) return false;
      return true;
    };
    // First matching point of the model, preferring ones that add no new profile.
    auto pick = [&](const std::function<bool(std::size_t)>& ok, const std::vector<std::size_t>* domain) {
      std::optional<std::size_t> fallback;
      auto scan = [&](std::size_t x) -> bool {
        if (!in_model(x, fam) || !ok(x)) return false;
        if (within_used(x)) {
          take(x);
          return true;
        }
        if (!fallback) fallback = x;
        return false;
      };
      if (domain) {
        for (auto x : *domain)
          if (scan(x)) return;
      } else {
        for (std::size_t x = 0; x < ps_.n; ++x)
          if (scan(x)) return;
      }
      if (fallback) take(*fallback);
    };
    auto covered = [&](const std::function<bool(std::size_t)>& ok) {
      for (auto x : chosen)
        if (ok(x)) return true;
      return false;
    };

    pick([&](std::size_t x) { return ps_.row(x)[p_.root] != 0; }, nullptr);
    for (std::size_t j = 0; j < p_.box_nodes.size(); ++j) {
      if (B_[j]) continue;
      const int body = p_.a[p_.box_nodes[j]];
      auto ok = [&](std::size_t x) { return ps_.row(x)[body] == 0; };
      if (!covered(ok)) pick(ok, nullptr);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < k_; ++i) {
        std::vector<std::uint32_t> current(used[i].begin(), used[i].end());
        for (auto pi : current)
          for (int node : p_.cstit_nodes[i]) {
            if (profiles_[i][pi] >> p_.bit[node] & 1) continue;
            const int body = p_.a[node];
            auto ok = [&](std::size_t x) { return loc(x, i) == pi && ps_.row(x)[body] == 0; };
            if (covered(ok)) continue;
            std::size_t before = chosen.size();
            pick(ok, &bucket_[i][pi]);
            if (chosen.size() != before) changed = true;
          }
      }
    }
    // Close under rectangularity over the profiles in use.
    if (k_ >= 2) {
      std::set<std::vector<std::uint32_t>> have;
      for (auto x : chosen) have.insert(key(x));
      std::vector<std::vector<std::uint32_t>> axes;
      for (std::size_t i = 0; i < k_; ++i) axes.emplace_back(used[i].begin(), used[i].end());
      std::vector<std::size_t> idx(k_, 0);
      while (true) {
        std::vector<std::uint32_t> t(k_);
        for (std::size_t i = 0; i < k_; ++i) t[i] = axes[i][idx[i]];
        if (!have.count(t)) {
          for (auto x : bucket_[0][t[0]])
            if (key(x) == t) {
              take(x);
              have.insert(t);
              break;
            }
          if (!have.count(t)) throw std::logic_error("rectangular closure failed");
        }
        std::size_t i = k_;
        bool done = true;
        while (i > 0) {
          --i;
          if (++idx[i] < axes[i].size()) {
            done = false;
            break;
          }
          idx[i] = 0;
        }
        if (done) break;
      }
    }
    return chosen;
  }

 private:
  const Problem& p_;
  const std::vector<char>& B_;
  const PointSet& ps_;
  const Deadline& deadline_;
  std::size_t k_;
  std::vector<std::uint32_t> local_;
  std::vector<std::vector<std::uint64_t>> profiles_;
  std::vector<std::vector<std::vector<std::size_t>>> bucket_;
  std::uint64_t families_ = 0;

  std::uint32_t loc(std::size_t x, std::size_t i) const { return local_[x * k_ + i]; }
  std::vector<std::uint32_t> key(std::size_t x) const {
    return std::vector<std::uint32_t>(local_.begin() + static_cast<std::ptrdiff_t>(x * k_),
                                      local_.begin() + static_cast<std::ptrdiff_t>((x + 1) * k_));
  }
  bool in_model(std::size_t x, const Family& f) const {
    for (std::size_t i = 0; i < k_; ++i)
      if (!f.member[i][loc(x, i)]) return false;
    return true;
  }

  bool profile_witnessed(std::size_t i, std::uint32_t pi, const Family& f) const {
    const std::uint64_t code = profiles_[i][pi];
    bool any = false;
    for (auto x : bucket_[i][pi])
      if (in_model(x, f)) {
        any = true;
        break;
      }
    if (!any) return false;
    for (int node : p_.cstit_nodes[i]) {
      if (code >> p_.bit[node] & 1) continue;
      const int body = p_.a[node];
      bool ok = false;
      for (auto x : bucket_[i][pi])
        if (ps_.row(x)[body] == 0 && in_model(x, f)) {
          ok = true;
          break;
        }
      if (!ok) return false;
    }
    return true;
  }

  // Removes profiles that cannot be witnessed even inside the current family.
  bool prune(Family& f) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < k_; ++i) {
        bool nonempty = false;
        for (std::uint32_t pi = 0; pi < f.member[i].size(); ++pi) {
          if (!f.member[i][pi]) continue;
          deadline_.check();
          if (!profile_witnessed(i, pi, f)) {
            f.member[i][pi] = 0;
            changed = true;
          } else {
            nonempty = true;
          }
        }
        if (!nonempty) return false;
      }
    }
    return true;
  }

  bool global_ok(const Family& f) const {
    bool root = false;
    for (std::size_t x = 0; x < ps_.n && !root; ++x) root = ps_.row(x)[p_.root] && in_model(x, f);
    if (!root) return false;
    for (std::size_t j = 0; j < p_.box_nodes.size(); ++j) {
      if (B_[j]) continue;
      const int body = p_.a[p_.box_nodes[j]];
      bool ok = false;
      for (std::size_t x = 0; x < ps_.n && !ok; ++x) ok = !ps_.row(x)[body] && in_model(x, f);
      if (!ok) return false;
    }
    return true;
  }

  // Subsets for agents 0..k-2, largest first; the last agent takes every compatible profile.
  void choose(std::size_t i, const std::vector<std::vector<std::uint32_t>>& elems, const Family& base, Family& trial,
              std::optional<Family>& found) {
    if (found) return;
    if (i + 1 == k_) {
      ++families_;
      deadline_.check();
      complete_last(elems, trial, found);
      return;
    }
    const auto& E = elems[i];
    const std::uint64_t total = E.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << E.size()) - 1;
    for (std::uint64_t mask = total; mask >= 1 && !found; --mask) {
      std::fill(trial.member[i].begin(), trial.member[i].end(), 0);
      for (std::size_t e = 0; e < E.size(); ++e)
        if (mask >> e & 1) trial.member[i][E[e]] = 1;
      choose(i + 1, elems, base, trial, found);
    }
  }

  void complete_last(const std::vector<std::vector<std::uint32_t>>& elems, Family& trial, std::optional<Family>& found) {
    const std::size_t last = k_ - 1;
    std::uint64_t prefixes = 1;
    for (std::size_t i = 0; i < last; ++i) {
      std::uint64_t c = 0;
      for (auto m : trial.member[i]) c += m;
      prefixes *= c;
    }
    std::fill(trial.member[last].begin(), trial.member[last].end(), 0);
    for (auto pi : elems[last]) {
      std::set<std::vector<std::uint32_t>> seen;
      for (auto x : bucket_[last][pi]) {
        bool inside = true;
        for (std::size_t i = 0; i < last && inside; ++i) inside = trial.member[i][loc(x, i)] != 0;
        if (inside) seen.insert(key(x));
      }
      if (seen.size() == prefixes) trial.member[last][pi] = 1;
    }
    // Witness conditions for the last agent only involve points whose last profile is fixed.
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto pi : elems[last])
        if (trial.member[last][pi] && !profile_witnessed(last, pi, trial)) {
          trial.member[last][pi] = 0;
          changed = true;
        }
    }
    if (std::none_of(trial.member[last].begin(), trial.member[last].end(), [](char c) { return c != 0; })) return;
    for (std::size_t i = 0; i < last; ++i)
      for (std::uint32_t pi = 0; pi < trial.member[i].size(); ++pi)
        if (trial.member[i][pi] && !profile_witnessed(i, pi, trial)) return;
    if (!global_ok(trial)) return;
    found = trial;
  }
};

kripke::MomentModel assemble(const Problem& p, const PointSet& ps, const std::vector<std::size_t>& chosen,
                             const std::set<std::string>& atom_names, Agent universe) {
  kripke::MomentModel m;
  m.agent_universe = universe;
  for (std::size_t w = 0; w < chosen.size(); ++w) m.worlds.push_back("w" + std::to_string(w + 1));
  for (std::size_t i = 0; i < p.agents.size(); ++i) {
    std::map<std::uint64_t, std::uint32_t> block;
    std::vector<std::uint32_t> b;
    for (auto x : chosen) {
      auto [it, fresh] = block.emplace(ps.prof(x, i), static_cast<std::uint32_t>(block.size()));
      b.push_back(it->second);
    }
    m.partitions.emplace(p.agents[i], Partition(std::move(b)));
  }
  for (const auto& name : atom_names) {
    auto it = std::find(p.atom_names.begin(), p.atom_names.end(), name);
    std::vector<bool> e(chosen.size(), false);
    if (it != p.atom_names.end()) {
      auto id = it - p.atom_names.begin();
      for (std::size_t w = 0; w < chosen.size(); ++w) e[w] = ps.val[chosen[w]] >> id & 1;
    }
    m.valuation.emplace(name, std::move(e));
  }
  return m;
}

std::optional<kripke::World> satisfying_world(const kripke::MomentModel& m, const Formula& f) {
  if (kripke::rectangularity_violation(m)) return std::nullopt;
  auto e = kripke::extension(kripke::moment_to_kripke(m), f);
  for (kripke::World w = 0; w < e.size(); ++w)
    if (e[w]) return w;
  return std::nullopt;
}

kripke::MomentModel drop_worlds(const kripke::MomentModel& m, const std::vector<std::size_t>& gone) {
  std::vector<std::size_t> keep;
  for (std::size_t w = 0; w < m.size(); ++w)
    if (std::find(gone.begin(), gone.end(), w) == gone.end()) keep.push_back(w);
  kripke::MomentModel out;
  out.agent_universe = m.agent_universe;
  for (auto w : keep) out.worlds.push_back(m.worlds[w]);
  for (const auto& [i, part] : m.partitions) out.partitions.emplace(i, part.restrict(keep));
  for (const auto& [a, e] : m.valuation) {
    std::vector<bool> ne;
    for (auto w : keep) ne.push_back(e[w]);
    out.valuation.emplace(a, std::move(ne));
  }
  return out;
}

void rename_worlds(kripke::MomentModel& m) {
  for (std::size_t w = 0; w < m.size(); ++w) m.worlds[w] = "w" + std::to_string(w + 1);
}

// Greedy removal of whole cells, then of single worlds, while the formula stays satisfied somewhere.
// Dropping a cell keeps the remaining cells rectangular, which single worlds of a grid cannot.
kripke::MomentModel trim(kripke::MomentModel m, const Formula& f) {
  if (m.size() > 48) return m;
  bool shrunk = true;
  while (shrunk && m.size() > 1) {
    shrunk = false;
    for (const auto& [i, part] : m.partitions) {
      for (const auto& cell : part.cells()) {
        if (cell.size() == m.size()) continue;
        auto smaller = drop_worlds(m, cell);
        if (satisfying_world(smaller, f)) {
          m = std::move(smaller);
          shrunk = true;
          break;
        }
      }
      if (shrunk) break;
    }
  }
  for (std::size_t w = m.size(); w-- > 0;) {
    if (m.size() == 1) break;
    auto smaller = drop_worlds(m, {w});
    if (satisfying_world(smaller, f)) m = std::move(smaller);
  }
  rename_worlds(m);
  return m;
}

struct Found {
  kripke::MomentModel model;
};

void check_agents(const Formula& f, const SolverConfig& cfg) {
  if (cfg.agent_universe < 1) throw SolverError(SolverError::Kind::InvalidInput, "agent universe must be at least 1");
  for (auto i : agents(f))
    if (i >= cfg.agent_universe)
      throw SolverError(SolverError::Kind::InvalidInput,
                        "agent " + std::to_string(i) + " is outside the agent universe of size " +
                            std::to_string(cfg.agent_universe));
}

SatResult search(const Formula& f, const SolverConfig& cfg) {
  const Deadline deadline(cfg.timeout);
  const Formula g = expand_dstit(f);
  const Problem p = build_problem(g);
  const auto atom_names = atoms(f);

  SatStats stats;
  stats.engine = "search";
  stats.bound_exponent = length(f);

  std::mutex mu;
  std::atomic<std::uint64_t> points{0}, families{0}, candidates{0};

  auto attempt = [&](const std::vector<char>& B) -> std::optional<kripke::MomentModel> {
    candidates.fetch_add(1);
    PointSet ps = enumerate_points(p, B, deadline);
    points.fetch_add(ps.n);
    if (ps.n == 0) return std::nullopt;
    ProfileSearch search(p, B, ps, deadline);
    auto fam = search.solve();
    families.fetch_add(search.families());
    if (!fam) return std::nullopt;
    auto chosen = search.witness_points(*fam);
    return assemble(p, ps, chosen, atom_names, cfg.agent_universe);
  };

  std::optional<kripke::MomentModel> model;
  BoxCandidates boxes(p);
  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    boxes.run(deadline, [&](const std::vector<char>& B) {
      model = attempt(B);
      return !model.has_value();
    });
  } else {
    // Batches keep the lowest-index success, so the witness does not depend on scheduling.
    std::vector<std::vector<char>> batch;
    auto flush = [&]() -> bool {
      std::vector<std::optional<kripke::MomentModel>> results(batch.size());
      std::vector<std::exception_ptr> errors(batch.size());
      std::atomic<std::size_t> next{0};
      std::atomic<std::size_t> best{batch.size()};
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (std::size_t j = next.fetch_add(1); j < batch.size(); j = next.fetch_add(1)) {
            if (j > best.load()) break;
            try {
              results[j] = attempt(batch[j]);
              if (results[j]) {
                std::size_t cur = best.load();
                while (j < cur && !best.compare_exchange_weak(cur, j)) {
                }
              }
            } catch (...) {
              errors[j] = std::current_exception();
            }
          }
        });
      for (auto& th : pool) th.join();
      for (std::size_t j = 0; j < batch.size(); ++j) {
        if (errors[j] && j <= best.load()) std::rethrow_exception(errors[j]);
        if (results[j]) {
          model = std::move(results[j]);
          return false;
        }
      }
      batch.clear();
      return true;
    };
    boxes.run(deadline, [&](const std::vector<char>& B) {
      batch.push_back(B);
      if (batch.size() >= 4 * threads) return flush();
      return true;
    });
    if (!model && !batch.empty()) flush();
  }
  (void)mu;

  stats.points = points.load();
  stats.families = families.load();
  stats.box_candidates = candidates.load();

  SatResult result;
  if (!model) {
    result.verdict = Verdict::Unsat;
    stats.exhausted = true;
    result.stats = stats;
    return result;
  }
  if (!satisfying_world(*model, f)) throw std::logic_error("search witness failed independent model checking");
  kripke::MomentModel small = trim(std::move(*model), f);
  auto w = satisfying_world(small, f);
  if (!w) throw std::logic_error("trimmed witness failed independent model checking");
  stats.witness_worlds = small.size();
  result.verdict = Verdict::Sat;
  result.witness = std::move(small);
  result.witness_world = *w;
  result.stats = stats;
  return result;
}

}  // namespace

SatResult sat(const Formula& f, const SolverConfig& cfg) {
  check_agents(f, cfg);
  if (cfg.engine == Engine::Oracle) {
    const std::size_t cap = oracle_world_cap();
    std::size_t limit = cap;
    if (cfg.world_bound_override) limit = static_cast<std::size_t>(std::min<std::uint64_t>(*cfg.world_bound_override, cap));
    SatResult r = oracle(f, limit, cfg);
    if (r.verdict == Verdict::Sat) return r;
    const std::size_t len = length(f);
    const bool covered = len < 63 && limit >= (std::uint64_t{1} << len);
    if (covered) {
      r.stats.exhausted = true;
      r.stats.bound_used.reset();
      return r;
    }
    r.stats.bounded_unsat = true;
    throw SolverError(SolverError::Kind::Inconclusive,
                      "no model with at most " + std::to_string(limit) +
                          " worlds, but the theoretical bound 2^" + std::to_string(len) + " was not reached",
                      r.stats);
  }
  SatResult r = search(f, cfg);
  if (r.verdict == Verdict::Sat && cfg.world_bound_override && r.stats.witness_worlds > *cfg.world_bound_override) {
    r.stats.bound_used = *cfg.world_bound_override;
    throw SolverError(SolverError::Kind::Inconclusive,
                      "satisfiable, but the witness found has " + std::to_string(r.stats.witness_worlds) +
                          " worlds, above the requested bound " + std::to_string(*cfg.world_bound_override),
                      r.stats);
  }
  return r;
}

bool valid(const Formula& f, const SolverConfig& cfg) { return sat(neg(f), cfg).verdict == Verdict::Unsat; }

SatResult sat_single_agent(const Formula& f, const SolverConfig& cfg) {
  if (cfg.agent_universe != 1)
    throw SolverError(SolverError::Kind::InvalidInput, "sat_single_agent needs agent_universe = 1");
  for (auto i : agents(f))
    if (i != 0) throw SolverError(SolverError::Kind::InvalidInput, "sat_single_agent called with more agents");
  SolverConfig c = cfg;
  c.engine = Engine::Search;
  c.world_bound_override.reset();
  SatResult r = sat(f, c);
  const std::uint64_t len = length(f);
  const std::uint64_t bound = len * len;
  r.stats.bound_used = bound;
  if (r.verdict == Verdict::Sat && r.stats.witness_worlds > bound)
    throw SolverError(SolverError::Kind::BoundViolation,
                      "finding: witness for " + print(f) + " has " + std::to_string(r.stats.witness_worlds) +
                          " worlds, above length^2 = " + std::to_string(bound),
                      r.stats);
  return r;
}

}  // namespace stitkit::solver
