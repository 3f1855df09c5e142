#include <algorithm>
#include <map>

#include "stitkit/kripke.hpp"
#include "text_util.hpp"

namespace stitkit::kripke {

namespace {


std::vector<std::vector<std::size_t>> resolve_cells(const std::string& payload,
                                                    const std::map<std::string, World>& ids,
                                                    std::size_t line) {
  std::vector<std::vector<std::size_t>> cells;
  for (const auto& group : detail::brace_groups(payload, line)) {
    std::vector<std::size_t> cell;
    for (const auto& name : group) {
      auto it = ids.find(name);
      if (it == ids.end()) throw FormatError("unknown world '" + name + "'", line);
      cell.push_back(it->second);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

Partition cells_to_partition(std::size_t n, const std::vector<std::vector<std::size_t>>& cells,
                             std::size_t line) {
  try {
    return Partition::from_cells(n, cells);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("classes do not partition the worlds: ") + e.what(), line);
  }
}

}  // namespace

AnyModel read_model(const std::string& text) {
  const auto lines = detail::content_lines(text);
  if (lines.empty()) throw FormatError("empty model file", 1);
  const auto header = detail::words(lines.front().text);
  const bool moment = header.front() == "moment";
  if (!moment && header.front() != "kripke")
    throw FormatError("first line must be 'kripke agents=N' or 'moment agents=N'", lines.front().number);
  std::optional<Agent> declared;
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k].rfind("agents=", 0) != 0)
      throw FormatError("unknown header field '" + header[k] + "'", lines.front().number);
    declared = static_cast<Agent>(detail::parse_natural(header[k].substr(7), lines.front().number, "agent count"));
  }

  std::vector<std::string> worlds;
  std::map<std::string, World> ids;
  std::map<Agent, Partition> parts;
  std::optional<Partition> box;
  std::map<std::string, std::vector<bool>> valuation;

  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [number, line] = lines[k];
    std::string head, payload;
    if (!detail::split_colon(line, head, payload)) throw FormatError("expected 'key: ...'", number);
    const auto key = detail::words(head);
    if (key.empty()) throw FormatError("missing key", number);
    if (key[0] == "worlds" && key.size() == 1) {
      if (!worlds.empty()) throw FormatError("worlds declared twice", number);
      worlds = detail::words(payload);
      if (worlds.empty()) throw FormatError("a model needs at least one world", number);
      for (World w = 0; w < worlds.size(); ++w)
        if (!ids.emplace(worlds[w], w).second) throw FormatError("duplicate world '" + worlds[w] + "'", number);
      continue;
    }
    if (worlds.empty()) throw FormatError("'worlds:' must come first", number);
    if ((key[0] == "rel" && !moment) || (key[0] == "part" && moment)) {
      if (key.size() != 2) throw FormatError("expected '" + key[0] + " <agent>:'", number);
      Agent i = static_cast<Agent>(detail::parse_natural(key[1], number, "agent"));
      if (parts.count(i)) throw FormatError("agent " + key[1] + " declared twice", number);
      parts.emplace(i, cells_to_partition(worlds.size(), resolve_cells(payload, ids, number), number));
    } else if (key[0] == "box" && key.size() == 1 && !moment) {
      if (box) throw FormatError("box declared twice", number);
      box = cells_to_partition(worlds.size(), resolve_cells(payload, ids, number), number);
    } else if (key[0] == "val" && key.size() == 2) {
      if (!is_identifier(key[1])) throw FormatError("bad atom name '" + key[1] + "'", number);
      auto& ext = valuation[key[1]];
      ext.assign(worlds.size(), false);
      for (const auto& name : detail::words(payload)) {
        auto it = ids.find(name);
        if (it == ids.end()) throw FormatError("unknown world '" + name + "'", number);
        ext[it->second] = true;
      }
    } else {
      throw FormatError("unknown line '" + key[0] + "'", number);
    }
  }
  if (worlds.empty()) throw FormatError("missing 'worlds:' line", lines.back().number);

  Agent universe = 1;
  for (const auto& [i, p] : parts) universe = std::max<Agent>(universe, i + 1);
  if (declared) {
    if (*declared < 1) throw FormatError("agents must be at least 1", lines.front().number);
    if (*declared < universe) throw FormatError("a stored agent lies outside agents=N", lines.front().number);
    universe = *declared;
  }

  if (moment) {
    MomentModel m;
    m.worlds = std::move(worlds);
    m.partitions = std::move(parts);
    m.valuation = std::move(valuation);
    m.agent_universe = universe;
    return m;
  }
  KripkeModel m;
  m.worlds = std::move(worlds);
  for (const auto& [i, p] : parts) m.relations.emplace(i, Relation::from_partition(p));
  if (box) m.box = Relation::from_partition(*box);
  m.valuation = std::move(valuation);
  m.agent_universe = universe;
  return m;
}

namespace {

std::string cells_text(const Partition& p, const std::vector<std::string>& names) {
  std::string out;
  for (const auto& cell : p.cells()) {
    if (!out.empty()) out += ' ';
    out += '{';
    for (std::size_t k = 0; k < cell.size(); ++k) {
      if (k) out += ' ';
      out += names[cell[k]];
    }
    out += '}';
  }
  return out;
}

std::string relation_text(const Relation& r, const std::vector<std::string>& names) {
  auto classes = r.classes();
  if (!classes) throw ModelError("cannot write a relation that is not an equivalence");
  return cells_text(*classes, names);
}

void write_valuation(std::string& out, const std::map<std::string, std::vector<bool>>& val,
                     const std::vector<std::string>& names) {
  for (const auto& [atom, ext] : val) {
    out += "val " + atom + ":";
    for (World w = 0; w < ext.size(); ++w)
      if (ext[w]) out += " " + names[w];
    out += '\n';
  }
}

std::string world_line(const std::vector<std::string>& names) {
  std::string out = "worlds:";
  for (const auto& n : names) out += " " + n;
  return out + '\n';
}

}  // namespace

std::string write_model(const KripkeModel& m) {
  std::string out = "kripke agents=" + std::to_string(m.agent_universe) + "\n" + world_line(m.worlds);
  if (m.box) out += "box: " + relation_text(*m.box, m.worlds) + "\n";
  for (const auto& [i, r] : m.relations) out += "rel " + std::to_string(i) + ": " + relation_text(r, m.worlds) + "\n";
  write_valuation(out, m.valuation, m.worlds);
  return out;
}

std::string write_model(const MomentModel& m) {
  std::string out = "moment agents=" + std::to_string(m.agent_universe) + "\n" + world_line(m.worlds);
  for (const auto& [i, p] : m.partitions) out += "part " + std::to_string(i) + ": " + cells_text(p, m.worlds) + "\n";
  write_valuation(out, m.valuation, m.worlds);
  return out;
}

}  // namespace stitkit::kripke
