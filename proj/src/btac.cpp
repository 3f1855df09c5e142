#include "stitkit/btac.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "stitkit/partition.hpp"
#include "text_util.hpp"

namespace stitkit::btac {

BtacModel::BtacModel(std::vector<Moment> moments) : moments_(std::move(moments)) {
  const std::size_t n = moments_.size();
  for (const auto& m : moments_)
    if (m.parent && *m.parent >= n) throw std::invalid_argument("parent index out of range");
  for (MomentId w = 0; w < n && acyclic_; ++w) {
    std::optional<MomentId> cur = moments_[w].parent;
    for (std::size_t steps = 0; cur; ++steps) {
      if (steps > n) {
        acyclic_ = false;
        break;
      }
      cur = moments_[*cur].parent;
    }
  }
  through_.assign(n, {});
  on_.assign(n, {});
  if (!acyclic_) return;

  std::vector<std::vector<MomentId>> children(n);
  std::vector<MomentId> roots;
  for (MomentId w = 0; w < n; ++w) {
    if (moments_[w].parent) children[*moments_[w].parent].push_back(w);
    else roots.push_back(w);
  }
  std::vector<MomentId> path;
  std::function<void(MomentId)> walk = [&](MomentId w) {
    path.push_back(w);
    if (children[w].empty()) histories_.push_back(path);
    for (auto c : children[w]) walk(c);
    path.pop_back();
  };
  for (auto r : roots) walk(r);
  for (auto& row : on_) row.assign(histories_.size(), 0);
  for (HistoryId h = 0; h < histories_.size(); ++h)
    for (auto w : histories_[h]) {
      through_[w].push_back(h);
      on_[w][h] = 1;
    }
}

std::optional<MomentId> BtacModel::find_moment(const std::string& name) const {
  for (MomentId w = 0; w < moments_.size(); ++w)
    if (moments_[w].name == name) return w;
  return std::nullopt;
}

std::optional<HistoryId> BtacModel::find_history(const std::string& name) const {
  for (HistoryId h = 0; h < histories_.size(); ++h)
    if (history_name(h) == name) return h;
  return std::nullopt;
}

bool BtacModel::passes(MomentId w, HistoryId h) const {
  return w < on_.size() && h < on_[w].size() && on_[w][h];
}

void BtacModel::set_choice(Agent i, MomentId w, Cells cells) {
  if (w >= moments_.size()) throw std::invalid_argument("moment index out of range");
  choice_[{i, w}] = std::move(cells);
}

const Cells* BtacModel::explicit_choice(Agent i, MomentId w) const {
  auto it = choice_.find({i, w});
  return it == choice_.end() ? nullptr : &it->second;
}

Cells BtacModel::choice(Agent i, MomentId w) const {
  if (const Cells* c = explicit_choice(i, w)) return *c;
  return {histories_through(w)};
}

std::set<Agent> BtacModel::agents_with_choices() const {
  std::set<Agent> out;
  for (const auto& [key, cells] : choice_) out.insert(key.first);
  return out;
}

void BtacModel::add_valuation(const std::string& atom, MomentId w, HistoryId h) {
  valuation_[atom].insert({w, h});
}

bool BtacModel::holds(const std::string& atom, MomentId w, HistoryId h) const {
  auto it = valuation_.find(atom);
  return it != valuation_.end() && it->second.count({w, h});
}

// ---------------------------------------------------------------------------

namespace {

std::string cell_text(const BtacModel& m, const std::vector<HistoryId>& cell) {
  std::string out = "{";
  for (std::size_t k = 0; k < cell.size(); ++k) {
    if (k) out += ' ';
    out += cell[k] < m.history_count() ? m.history_name(cell[k]) : "?" + std::to_string(cell[k]);
  }
  return out + "}";
}

// True when the cells partition H_w; otherwise appends the reason.
bool check_partition(const BtacModel& m, Agent i, MomentId w, const Cells& cells, std::vector<Violation>& out) {
  const std::string where = "agent " + std::to_string(i) + " at " + m.moments()[w].name;
  std::vector<char> seen(m.history_count(), 0);
  bool ok = true;
  for (const auto& cell : cells) {
    if (cell.empty()) {
      out.push_back({"partition", where + ": empty cell"});
      ok = false;
    }
    for (auto h : cell) {
      if (!m.passes(w, h)) {
        out.push_back({"partition", where + ": cell " + cell_text(m, cell) + " contains a history not through the moment"});
        ok = false;
        continue;
      }
      if (seen[h]) {
        out.push_back({"partition", where + ": " + m.history_name(h) + " lies in two cells"});
        ok = false;
      }
      seen[h] = 1;
    }
  }
  for (auto h : m.histories_through(w))
    if (!seen[h]) {
      out.push_back({"partition", where + ": " + m.history_name(h) + " is in no cell"});
      ok = false;
    }
  return ok;
}

}  // namespace

std::vector<Violation> validate_model(const BtacModel& m) {
  std::vector<Violation> out;
  if (!m.acyclic()) {
    out.push_back({"tree-likeness", "parent links contain a cycle"});
    return out;
  }
  if (m.moment_count() == 0) out.push_back({"nonempty", "model has no moments"});

  // Per moment, the agents whose explicit choice is a proper partition.
  std::map<MomentId, std::vector<std::pair<Agent, const Cells*>>> usable;
  for (const auto& [key, cells] : m.choices())
    if (check_partition(m, key.first, key.second, cells, out)) usable[key.second].push_back({key.first, &cells});

  for (const auto& [w, list] : usable) {
    std::vector<std::size_t> pick(list.size(), 0);
    bool done = list.empty();
    while (!done) {
      std::vector<char> alive(m.history_count(), 0);
      for (auto h : m.histories_through(w)) alive[h] = 1;
      for (std::size_t a = 0; a < list.size(); ++a) {
        std::vector<char> in(m.history_count(), 0);
        for (auto h : (*list[a].second)[pick[a]]) in[h] = 1;
        for (std::size_t h = 0; h < alive.size(); ++h) alive[h] = alive[h] && in[h];
      }
      if (std::none_of(alive.begin(), alive.end(), [](char c) { return c != 0; })) {
        std::string witness;
        for (std::size_t a = 0; a < list.size(); ++a) {
          if (!witness.empty()) witness += ", ";
          witness += "agent " + std::to_string(list[a].first) + " " + cell_text(m, (*list[a].second)[pick[a]]);
        }
        out.push_back({"superadditivity", "at " + m.moments()[w].name + ": " + witness + " have empty intersection"});
        break;
      }
      std::size_t k = list.size();
      done = true;
      while (k > 0) {
        --k;
        if (++pick[k] < list[k].second->size()) {
          done = false;
          break;
        }
        pick[k] = 0;
      }
    }
  }

  for (const auto& [atom, pairs] : m.valuation())
    for (const auto& [w, h] : pairs)
      if (!m.passes(w, h))
        out.push_back({"valuation", "V(" + atom + ") contains an index whose moment is not on its history"});
  return out;
}

namespace {

using Ext = std::vector<char>;

}  // namespace

std::vector<bool> moment_extension(const BtacModel& m, MomentId w, const Formula& f) {
  if (w >= m.moment_count()) throw ModelError("unknown moment " + std::to_string(w));
  const auto& hw = m.histories_through(w);
  const std::size_t n = hw.size();
  std::unordered_map<HistoryId, std::size_t> pos;
  for (std::size_t k = 0; k < n; ++k) pos.emplace(hw[k], k);

  std::unordered_map<Formula, Ext> ext;
  auto agent_cells = [&](Agent i) {
    std::vector<std::vector<std::size_t>> cells;
    for (const auto& cell : m.choice(i, w)) {
      std::vector<std::size_t> c;
      for (auto h : cell) c.push_back(pos.at(h));
      cells.push_back(std::move(c));
    }
    return cells;
  };
  auto settled = [&](const Ext& b) { return std::all_of(b.begin(), b.end(), [](char c) { return c != 0; }); };
  auto act = [&](Agent i, const Ext& b) {
    Ext e(n, 0);
    for (const auto& cell : agent_cells(i)) {
      bool all = std::all_of(cell.begin(), cell.end(), [&](std::size_t k) { return b[k] != 0; });
      for (auto k : cell) e[k] = all;
    }
    return e;
  };

  for (const auto& g : subformulas(f)) {
    Ext e(n, 0);
    switch (g.op()) {
      case Op::Atom:
        for (std::size_t k = 0; k < n; ++k) e[k] = m.holds(g.name(), w, hw[k]);
        break;
      case Op::Not: {
        const Ext& b = ext.at(g.body());
        for (std::size_t k = 0; k < n; ++k) e[k] = !b[k];
        break;
      }
      case Op::And: {
        const Ext& a = ext.at(g.lhs());
        const Ext& b = ext.at(g.rhs());
        for (std::size_t k = 0; k < n; ++k) e[k] = a[k] && b[k];
        break;
      }
      case Op::Cstit:
        e = act(g.agent(), ext.at(g.body()));
        break;
      case Op::Dstit: {
        // Positive condition on the agent's cell, negative condition somewhere in H_w.
        const Ext& b = ext.at(g.body());
        e = act(g.agent(), b);
        if (settled(b)) std::fill(e.begin(), e.end(), 0);
        break;
      }
      case Op::Box: {
        const bool all = settled(ext.at(g.body()));
        std::fill(e.begin(), e.end(), all);
        break;
      }
    }
    ext.emplace(g, std::move(e));
  }
  const Ext& top = ext.at(f);
  return std::vector<bool>(top.begin(), top.end());
}

bool eval(const BtacModel& m, Index idx, const Formula& f) {
  if (idx.moment >= m.moment_count()) throw ModelError("unknown moment " + std::to_string(idx.moment));
  if (!m.passes(idx.moment, idx.history))
    throw ModelError("history " + std::to_string(idx.history + 1) + " does not pass through moment " +
                     m.moments()[idx.moment].name);
  const auto& hw = m.histories_through(idx.moment);
  auto k = static_cast<std::size_t>(std::find(hw.begin(), hw.end(), idx.history) - hw.begin());
  return moment_extension(m, idx.moment, f)[k];
}

bool valid_in_model(const BtacModel& m, const Formula& f) {
  for (MomentId w = 0; w < m.moment_count(); ++w) {
    auto e = moment_extension(m, w, f);
    if (std::find(e.begin(), e.end(), false) != e.end()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kMaxMoments = 3;
constexpr std::size_t kMaxHistories = 5;
constexpr std::size_t kMaxAgents = 3;
constexpr std::size_t kMaxValuationBits = 24;

void check_bounds(const EnumerationBounds& b) {
  if (b.max_moments > kMaxMoments || b.max_histories > kMaxHistories || b.agent_count > kMaxAgents)
    throw std::invalid_argument("enumeration bounds too large (limits: 3 branching moments, 5 histories, 3 agents)");
}

// Superadditive tuples of partitions of k histories for the given number of agents.
const std::vector<std::vector<Partition>>& local_choices(std::size_t k, std::size_t agents) {
  static std::map<std::pair<std::size_t, std::size_t>, std::vector<std::vector<Partition>>> cache;
  auto key = std::make_pair(k, agents);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<Partition> all;
  for_each_partition(k, [&](const Partition& p) {
    all.push_back(p);
    return true;
  });
  std::vector<std::vector<Partition>> out;
  std::vector<std::size_t> pick(agents, 0);
  while (true) {
    std::vector<Partition> t;
    for (auto p : pick) t.push_back(all[p]);
    // Superadditive iff every tuple of blocks is realised by some history.
    std::set<std::vector<std::uint32_t>> seen;
    std::size_t product = 1;
    for (const auto& p : t) product *= p.block_count();
    for (std::size_t h = 0; h < k; ++h) {
      std::vector<std::uint32_t> sig;
      for (const auto& p : t) sig.push_back(p.block(h));
      seen.insert(sig);
    }
    if (seen.size() == product) out.push_back(std::move(t));
    std::size_t a = pick.size();
    bool done = true;
    while (a > 0) {
      --a;
      if (++pick[a] < all.size()) {
        done = false;
        break;
      }
      pick[a] = 0;
    }
    if (done) break;
  }
  return cache.emplace(key, std::move(out)).first->second;
}

// Builds every tree shape (branching moments first, then one leaf per history).
void for_each_shape(const EnumerationBounds& b, const std::function<bool(const BtacModel&)>& visit_shape) {
  if (b.max_histories >= 1) {
    BtacModel single({Moment{"w0", std::nullopt}});
    if (!visit_shape(single)) return;
  }
  for (std::size_t k = 1; k <= b.max_moments; ++k) {
    std::vector<std::size_t> parent(k, 0);  // parent[j] < j for j >= 1
    while (true) {
      std::vector<std::size_t> internal_children(k, 0);
      for (std::size_t j = 1; j < k; ++j) ++internal_children[parent[j]];
      std::vector<std::size_t> leaves(k, 0);
      for (std::size_t j = 0; j < k; ++j) leaves[j] = internal_children[j] == 0 ? 1 : 0;
      std::vector<std::size_t> extra(k, 0);
      while (true) {
        std::size_t total = 0;
        for (std::size_t j = 0; j < k; ++j) total += leaves[j] + extra[j];
        if (total <= b.max_histories) {
          std::vector<Moment> ms;
          for (std::size_t j = 0; j < k; ++j)
            ms.push_back({"w" + std::to_string(j), j == 0 ? std::nullopt : std::optional<MomentId>(parent[j])});
          for (std::size_t j = 0; j < k; ++j)
            for (std::size_t c = 0; c < leaves[j] + extra[j]; ++c)
              ms.push_back({"w" + std::to_string(ms.size()), static_cast<MomentId>(j)});
          if (!visit_shape(BtacModel(std::move(ms)))) return;
        }
        std::size_t j = k;
        bool done = true;
        while (j > 0) {
          --j;
          if (++extra[j] <= b.max_histories) {
            done = false;
            break;
          }
          extra[j] = 0;
        }
        if (done) break;
      }
      std::size_t j = k;
      bool done = true;
      while (j > 1) {
        --j;
        if (++parent[j] < j) {
          done = false;
          break;
        }
        parent[j] = 0;
      }
      if (done) break;
    }
  }
}

}  // namespace

void enumerate_frames(const EnumerationBounds& bounds, const std::function<bool(const BtacModel&)>& visit) {
  check_bounds(bounds);
  for_each_shape(bounds, [&](const BtacModel& shape) {
    // Choices at every moment with more than one history; leaves keep the vacuous cell.
    std::vector<MomentId> branching;
    for (MomentId w = 0; w < shape.moment_count(); ++w)
      if (shape.histories_through(w).size() >= 2) branching.push_back(w);
    std::vector<const std::vector<std::vector<Partition>>*> options;
    for (auto w : branching) options.push_back(&local_choices(shape.histories_through(w).size(), bounds.agent_count));
    std::vector<std::size_t> pick(branching.size(), 0);
    while (true) {
      BtacModel m = shape;
      for (std::size_t x = 0; x < branching.size(); ++x) {
        const auto& hw = m.histories_through(branching[x]);
        const auto& tuple = (*options[x])[pick[x]];
        for (std::size_t a = 0; a < tuple.size(); ++a) {
          Cells cells;
          for (const auto& cell : tuple[a].cells()) {
            std::vector<HistoryId> c;
            for (auto k : cell) c.push_back(hw[k]);
            cells.push_back(std::move(c));
          }
          m.set_choice(static_cast<Agent>(a), branching[x], std::move(cells));
        }
      }
      if (!visit(m)) return false;
      std::size_t x = pick.size();
      bool done = true;
      while (x > 0) {
        --x;
        if (++pick[x] < options[x]->size()) {
          done = false;
          break;
        }
        pick[x] = 0;
      }
      if (done) return true;
    }
  });
}

void enumerate_models(const EnumerationBounds& bounds, const std::function<bool(const BtacModel&)>& visit) {
  check_bounds(bounds);
  if (bounds.atoms.size() * (bounds.max_moments + 1) * bounds.max_histories > kMaxValuationBits)
    throw std::invalid_argument("enumeration bounds too large: too many valuation bits per model");
  bool keep_going = true;
  enumerate_frames(bounds, [&](const BtacModel& frame) {
    std::vector<Index> idx;
    for (MomentId w = 0; w < frame.moment_count(); ++w)
      for (auto h : frame.histories_through(w)) idx.push_back({w, h});
    const std::size_t bits = idx.size() * bounds.atoms.size();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
      BtacModel m = frame;
      for (std::size_t a = 0; a < bounds.atoms.size(); ++a)
        for (std::size_t k = 0; k < idx.size(); ++k)
          if (code >> (a * idx.size() + k) & 1) m.add_valuation(bounds.atoms[a], idx[k].moment, idx[k].history);
      if (!visit(m)) {
        keep_going = false;
        return false;
      }
    }
    return true;
  });
  (void)keep_going;
}

// ---------------------------------------------------------------------------

BtacModel read_model(const std::string& text) {
  const auto lines = detail::content_lines(text);
  if (lines.empty()) throw FormatError("empty model file", 1);
  const auto header = detail::words(lines.front().text);
  if (header.front() != "btac") throw FormatError("first line must be 'btac'", lines.front().number);
  std::optional<std::size_t> agent_limit;
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k].rfind("agents=", 0) != 0) throw FormatError("unknown header field '" + header[k] + "'", lines.front().number);
    agent_limit = detail::parse_natural(header[k].substr(7), lines.front().number, "agent count");
  }

  std::vector<Moment> moments;
  std::map<std::string, MomentId> ids;
  std::size_t k = 1;
  for (; k < lines.size(); ++k) {
    const auto w = detail::words(lines[k].text);
    if (w.front() != "moment") break;
    if (!(w.size() == 2 || (w.size() == 4 && w[2] == "parent")))
      throw FormatError("expected 'moment <id> [parent <id>]'", lines[k].number);
    if (ids.count(w[1])) throw FormatError("duplicate moment '" + w[1] + "'", lines[k].number);
    std::optional<MomentId> parent;
    if (w.size() == 4) {
      auto it = ids.find(w[3]);
      if (it == ids.end()) throw FormatError("unknown parent '" + w[3] + "' (parents must be declared first)", lines[k].number);
      parent = it->second;
    }
    ids.emplace(w[1], moments.size());
    moments.push_back({w[1], parent});
  }
  if (moments.empty()) throw FormatError("a model needs at least one moment", lines.front().number);
  BtacModel m(std::move(moments));

  auto history = [&](const std::string& name, std::size_t line) {
    auto h = m.find_history(name);
    if (!h) throw FormatError("unknown history '" + name + "'", line);
    return *h;
  };
  for (; k < lines.size(); ++k) {
    const auto& [number, line] = lines[k];
    std::string head, payload;
    if (!detail::split_colon(line, head, payload)) throw FormatError("expected 'key ...: ...'", number);
    const auto key = detail::words(head);
    if (key.size() == 3 && key[0] == "choice") {
      Agent i = static_cast<Agent>(detail::parse_natural(key[1], number, "agent"));
      if (agent_limit && i >= *agent_limit) throw FormatError("agent outside agents=N", number);
      auto it = ids.find(key[2]);
      if (it == ids.end()) throw FormatError("unknown moment '" + key[2] + "'", number);
      if (m.explicit_choice(i, it->second)) throw FormatError("choice declared twice", number);
      Cells cells;
      for (const auto& group : detail::brace_groups(payload, number)) {
        std::vector<HistoryId> cell;
        for (const auto& h : group) cell.push_back(history(h, number));
        cells.push_back(std::move(cell));
      }
      m.set_choice(i, it->second, std::move(cells));
    } else if (key.size() == 2 && key[0] == "val") {
      if (!is_identifier(key[1])) throw FormatError("bad atom name '" + key[1] + "'", number);
      for (const auto& token : detail::words(payload)) {
        auto slash = token.find('/');
        if (slash == std::string::npos) throw FormatError("expected <moment>/<history>, got '" + token + "'", number);
        auto it = ids.find(token.substr(0, slash));
        if (it == ids.end()) throw FormatError("unknown moment in '" + token + "'", number);
        m.add_valuation(key[1], it->second, history(token.substr(slash + 1), number));
      }
    } else if (key.size() >= 1 && key[0] == "moment") {
      throw FormatError("moment lines must precede choices and valuations", number);
    } else {
      throw FormatError("unknown line '" + line + "'", number);
    }
  }
  return m;
}

std::string write_model(const BtacModel& m) {
  std::string out = "btac\n";
  for (const auto& mo : m.moments()) {
    out += "moment " + mo.name;
    if (mo.parent) out += " parent " + m.moments()[*mo.parent].name;
    out += '\n';
  }
  for (HistoryId h = 0; h < m.history_count(); ++h) {
    out += "# " + m.history_name(h) + ":";
    for (auto w : m.histories()[h]) out += " " + m.moments()[w].name;
    out += '\n';
  }
  for (const auto& [key, cells] : m.choices()) {
    out += "choice " + std::to_string(key.first) + " " + m.moments()[key.second].name + ":";
    for (const auto& cell : cells) out += " " + cell_text(m, cell);
    out += '\n';
  }
  for (const auto& [atom, pairs] : m.valuation()) {
    out += "val " + atom + ":";
    for (const auto& [w, h] : pairs) out += " " + m.moments()[w].name + "/" + m.history_name(h);
    out += '\n';
  }
  return out;
}

Index parse_index(const BtacModel& m, const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) throw ModelError("index must look like <moment>/<history>");
  auto w = m.find_moment(text.substr(0, slash));
  if (!w) throw ModelError("unknown moment '" + text.substr(0, slash) + "'");
  auto h = m.find_history(text.substr(slash + 1));
  if (!h) throw ModelError("unknown history '" + text.substr(slash + 1) + "'");
  if (!m.passes(*w, *h)) throw ModelError("history " + text.substr(slash + 1) + " does not pass through " + m.moments()[*w].name);
  return {*w, *h};
}

}  // namespace stitkit::btac
