#include "stitkit/axioms.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

#include "text_util.hpp"

namespace stitkit::axioms {

namespace {

const std::vector<std::pair<SchemaKind, std::string>>& kind_names() {
  static const std::vector<std::pair<SchemaKind, std::string>> names{
      {SchemaKind::S5BoxK, "S5Box-K"}, {SchemaKind::S5BoxT, "S5Box-T"}, {SchemaKind::S5Box5, "S5Box-5"},
      {SchemaKind::S5iK, "S5i-K"},     {SchemaKind::S5iT, "S5i-T"},     {SchemaKind::S5i5, "S5i-5"},
      {SchemaKind::InclBox, "InclBox"}, {SchemaKind::AIA, "AIA"},       {SchemaKind::AAIA, "AAIA"},
      {SchemaKind::GPerm, "GPerm"},     {SchemaKind::DefBox, "DefBox"}, {SchemaKind::Perm01, "Perm01"},
      {SchemaKind::ChurchRosser, "ChurchRosser"}, {SchemaKind::Custom, "Custom"},
  };
  return names;
}

Formula slot(const Bindings& b, const std::string& name) {
  auto it = b.find(name);
  if (it == b.end()) throw AxiomError("missing binding for slot " + name);
  return it->second;
}

Formula empty_conjunction_for(const Formula& phi) {
  auto names = atoms(phi);
  return top(names.empty() ? "p" : *names.begin());
}

}  // namespace

std::string to_string(SchemaKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "?";
}

std::optional<SchemaKind> schema_kind(const std::string& name) {
  for (const auto& [k, n] : kind_names())
    if (n == name) return k;
  return std::nullopt;
}

std::string describe(const Schema& s) {
  std::string out = s.kind == SchemaKind::Custom ? (s.custom_name.empty() ? "Custom" : s.custom_name) : to_string(s.kind);
  switch (s.kind) {
    case SchemaKind::S5iK:
    case SchemaKind::S5iT:
    case SchemaKind::S5i5:
    case SchemaKind::InclBox: out += "(i=" + std::to_string(s.i) + ")"; break;
    case SchemaKind::AIA:
    case SchemaKind::AAIA: {
      out += "(k=" + std::to_string(s.k);
      if (!s.agents.empty()) {
        out += " agents=";
        for (std::size_t j = 0; j < s.agents.size(); ++j) out += (j ? "," : "") + std::to_string(s.agents[j]);
      }
      out += ")";
      break;
    }
    case SchemaKind::GPerm:
      out += "(k=" + std::to_string(s.k) + " l=" + std::to_string(s.l) + " m=" + std::to_string(s.m) +
             " n=" + std::to_string(s.n) + ")";
      break;
    default: break;
  }
  return out;
}

std::vector<std::string> slots(const Schema& s) {
  switch (s.kind) {
    case SchemaKind::S5BoxK:
    case SchemaKind::S5iK: return {"phi", "psi"};
    case SchemaKind::AIA: {
      std::vector<std::string> out;
      for (std::size_t j = 0; j <= s.k; ++j) out.push_back("phi" + std::to_string(j));
      return out;
    }
    case SchemaKind::Custom: return s.custom_slots;
    default: return {"phi"};
  }
}

Formula instantiate(const Schema& s, const Bindings& bindings) {
  const auto expected = slots(s);
  for (const auto& [name, f] : bindings)
    if (std::find(expected.begin(), expected.end(), name) == expected.end())
      throw AxiomError("schema " + describe(s) + " has no slot " + name);
  switch (s.kind) {
    case SchemaKind::S5BoxK: {
      auto a = slot(bindings, "phi"), b = slot(bindings, "psi");
      return implies(box(implies(a, b)), implies(box(a), box(b)));
    }
    case SchemaKind::S5BoxT: {
      auto a = slot(bindings, "phi");
      return implies(box(a), a);
    }
    case SchemaKind::S5Box5: {
      auto a = slot(bindings, "phi");
      return implies(diamond(a), box(diamond(a)));
    }
    case SchemaKind::S5iK: {
      auto a = slot(bindings, "phi"), b = slot(bindings, "psi");
      return implies(cstit(s.i, implies(a, b)), implies(cstit(s.i, a), cstit(s.i, b)));
    }
    case SchemaKind::S5iT: {
      auto a = slot(bindings, "phi");
      return implies(cstit(s.i, a), a);
    }
    case SchemaKind::S5i5: {
      auto a = slot(bindings, "phi");
      return implies(poss(s.i, a), cstit(s.i, poss(s.i, a)));
    }
    case SchemaKind::InclBox: {
      auto a = slot(bindings, "phi");
      return implies(box(a), cstit(s.i, a));
    }
    case SchemaKind::AIA: {
      if (s.k < 1) throw AxiomError("AIA needs k >= 1");
      std::vector<Agent> who = s.agents;
      if (who.empty())
        for (std::size_t j = 0; j <= s.k; ++j) who.push_back(static_cast<Agent>(j));
      if (who.size() != s.k + 1) throw AxiomError("AIA(k) needs k+1 agents");
      if (std::set<Agent>(who.begin(), who.end()).size() != who.size())
        throw AxiomError("AIA agents must be pairwise distinct");
      std::vector<Formula> left, right;
      for (std::size_t j = 0; j <= s.k; ++j) {
        auto c = cstit(who[j], slot(bindings, "phi" + std::to_string(j)));
        left.push_back(diamond(c));
        right.push_back(c);
      }
      return implies(conj_all(left), diamond(conj_all(right)));
    }
    case SchemaKind::AAIA: {
      if (s.k < 1) throw AxiomError("AAIA needs k >= 1");
      auto a = slot(bindings, "phi");
      std::vector<Formula> parts;
      for (std::size_t j = 0; j < s.k; ++j) parts.push_back(poss(static_cast<Agent>(j), a));
      return implies(diamond(a), poss(static_cast<Agent>(s.k), conj_all(parts)));
    }
    case SchemaKind::GPerm: {
      auto a = slot(bindings, "phi");
      std::vector<Formula> parts;
      for (std::size_t j = 0; j <= s.k; ++j)
        if (j != s.n) parts.push_back(poss(static_cast<Agent>(j), a));
      Formula body = parts.empty() ? empty_conjunction_for(a) : conj_all(parts);
      return implies(poss(s.l, poss(s.m, a)), poss(s.n, body));
    }
    case SchemaKind::DefBox: {
      auto a = slot(bindings, "phi");
      return iff(box(a), cstit(1, cstit(0, a)));
    }
    case SchemaKind::Perm01: {
      auto a = slot(bindings, "phi");
      return iff(poss(1, poss(0, a)), poss(0, poss(1, a)));
    }
    case SchemaKind::ChurchRosser: {
      auto a = slot(bindings, "phi");
      return implies(poss(0, cstit(1, a)), cstit(1, poss(0, a)));
    }
    case SchemaKind::Custom: {
      if (!s.custom) throw AxiomError("custom schema without a template");
      Bindings full;
      for (const auto& name : s.custom_slots) full.emplace(name, slot(bindings, name));
      return substitute(*s.custom, full);
    }
  }
  throw AxiomError("unknown schema");
}

std::string to_string(System s) {
  switch (s) {
    case System::Xu: return "XU";
    case System::Aaia: return "AAIA-SYS";
    case System::Gperm: return "GPERM-SYS";
  }
  return "?";
}

std::optional<System> system_from_name(const std::string& name) {
  for (auto s : {System::Xu, System::Aaia, System::Gperm})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

bool admits(System sys, SchemaKind kind) {
  switch (kind) {
    case SchemaKind::S5iK:
    case SchemaKind::S5iT:
    case SchemaKind::S5i5: return true;
    case SchemaKind::S5BoxK:
    case SchemaKind::S5BoxT:
    case SchemaKind::S5Box5:
    case SchemaKind::InclBox: return sys != System::Gperm;
    case SchemaKind::AIA: return sys == System::Xu;
    case SchemaKind::AAIA: return sys == System::Aaia;
    case SchemaKind::GPerm:
    case SchemaKind::DefBox: return sys == System::Gperm;
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Consequence checks.

namespace {

constexpr std::size_t kMaxFreeChoices = 26;

struct Closure {
  std::vector<Formula> sf;
  std::vector<int> kind;  // 0 atom-like, 1 not, 2 and, 3 S5 modality
  std::vector<int> a, b;
  std::vector<int> modality;  // index into the modality list, for kind 3
  std::vector<int> premise_at;  // node -> 1 if it is a premise root
  int goal = -1;
};

// Modalities: 0 for box when enabled, then one per listed agent.
Closure close_over(const std::vector<Formula>& premises, const Formula& goal, bool use_box,
                   const std::vector<Agent>& agents) {
  Closure c;
  std::unordered_map<Formula, int> index;
  std::function<int(const Formula&)> visit = [&](const Formula& f) -> int {
    if (auto it = index.find(f); it != index.end()) return it->second;
    int kind = 0, x = -1, y = -1, mod = -1;
    switch (f.op()) {
      case Op::Not:
        kind = 1;
        x = visit(f.body());
        break;
      case Op::And:
        kind = 2;
        x = visit(f.lhs());
        y = visit(f.rhs());
        break;
      case Op::Box:
        if (use_box) {
          kind = 3;
          mod = 0;
          x = visit(f.body());
        }
        break;
      case Op::Cstit: {
        auto it = std::find(agents.begin(), agents.end(), f.agent());
        if (it != agents.end()) {
          kind = 3;
          mod = static_cast<int>(it - agents.begin()) + (use_box ? 1 : 0);
          x = visit(f.body());
        }
        break;
      }
      default: break;
    }
    int id = static_cast<int>(c.sf.size());
    c.sf.push_back(f);
    c.kind.push_back(kind);
    c.a.push_back(x);
    c.b.push_back(y);
    c.modality.push_back(mod);
    c.premise_at.push_back(0);
    index.emplace(f, id);
    return id;
  };
  for (const auto& p : premises) c.premise_at[visit(p)] = 1;
  c.goal = visit(goal);
  return c;
}

// Enumerates assignments to the closure in which every premise is true, modal T conditions hold,
// and (when goal_false) the goal is false.
std::size_t enumerate_types(const Closure& c, bool goal_false, bool reflexive,
                            const std::function<bool(const std::vector<char>&)>& visit) {
  std::size_t free = 0;
  for (int k : c.kind) free += (k == 0 || k == 3);
  if (free > kMaxFreeChoices) throw AxiomError("consequence check too large (" + std::to_string(free) + " free subformulas)");
  std::vector<char> t(c.sf.size(), 0);
  bool stop = false;
  std::function<void(std::size_t)> dfs = [&](std::size_t x) {
    if (stop) return;
    if (x == c.sf.size()) {
      if (!visit(t)) stop = true;
      return;
    }
    auto next = [&]() {
      if (c.premise_at[x] && !t[x]) return;
      if (goal_false && static_cast<int>(x) == c.goal && t[x]) return;
      dfs(x + 1);
    };
    switch (c.kind[x]) {
      case 1:
        t[x] = !t[c.a[x]];
        next();
        break;
      case 2:
        t[x] = t[c.a[x]] && t[c.b[x]];
        next();
        break;
      case 3:
        t[x] = 0;
        next();
        if (!reflexive || t[c.a[x]]) {
          t[x] = 1;
          next();
        }
        break;
      default:
        t[x] = 0;
        next();
        t[x] = 1;
        next();
        break;
    }
  };
  dfs(0);
  return free;
}

}  // namespace

bool propositional_consequence(const std::vector<Formula>& premises, const Formula& goal) {
  std::vector<Formula> ps;
  for (const auto& p : premises) ps.push_back(strip_double_negations(p));
  auto c = close_over(ps, strip_double_negations(goal), false, {});
  bool countermodel = false;
  enumerate_types(c, true, false, [&](const std::vector<char>&) {
    countermodel = true;
    return false;
  });
  return !countermodel;
}

bool s5_consequence(const std::vector<Formula>& premises, const Formula& goal, bool use_box,
                    const std::vector<Agent>& agents, bool inclusion) {
  std::vector<Formula> ps;
  for (const auto& p : premises) ps.push_back(strip_double_negations(p));
  auto c = close_over(ps, strip_double_negations(goal), use_box, agents);
  const std::size_t mods = agents.size() + (use_box ? 1 : 0);
  std::vector<std::vector<int>> boxes(mods);
  for (std::size_t x = 0; x < c.sf.size(); ++x)
    if (c.kind[x] == 3) boxes[c.modality[x]].push_back(static_cast<int>(x));

  std::vector<std::vector<char>> types;
  enumerate_types(c, false, true, [&](const std::vector<char>& t) {
    types.push_back(t);
    if (types.size() > (std::size_t{1} << 22)) throw AxiomError("consequence check too large");
    return true;
  });

  // Types sharing the truth of every o-box form one o-cell; each false o-box needs a witness there.
  std::vector<char> alive(types.size(), 1);
  auto key = [&](std::size_t t, std::size_t o) {
    std::vector<char> k;
    for (int x : boxes[o]) k.push_back(types[t][x]);
    if (inclusion && use_box && o > 0)
      for (int x : boxes[0]) k.push_back(types[t][x]);
    return k;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t o = 0; o < mods; ++o) {
      std::map<std::vector<char>, std::set<int>> refuted;  // o-cell -> bodies false somewhere in it
      for (std::size_t t = 0; t < types.size(); ++t) {
        if (!alive[t]) continue;
        auto& r = refuted[key(t, o)];
        for (int x : boxes[o])
          if (!types[t][c.a[x]]) r.insert(c.a[x]);
      }
      for (std::size_t t = 0; t < types.size(); ++t) {
        if (!alive[t]) continue;
        const auto& r = refuted[key(t, o)];
        for (int x : boxes[o])
          if (!types[t][x] && !r.count(c.a[x])) {
            alive[t] = 0;
            changed = true;
            break;
          }
      }
    }
  }
  for (std::size_t t = 0; t < types.size(); ++t)
    if (alive[t] && !types[t][c.goal]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Derivation files.

namespace {

// Words, keeping key="quoted text" together.
std::vector<std::string> tokens(const std::string& s, std::size_t line) {
  std::vector<std::string> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    if (k >= s.size()) break;
    std::string tok;
    while (k < s.size() && !std::isspace(static_cast<unsigned char>(s[k]))) {
      if (s[k] == '"') {
        auto close = s.find('"', k + 1);
        if (close == std::string::npos) throw FormatError("unterminated quote", line);
        tok += s.substr(k, close - k + 1);
        k = close + 1;
      } else {
        tok += s[k++];
      }
    }
    out.push_back(tok);
  }
  return out;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

Agent parse_agent(const std::string& s, std::size_t line) {
  auto v = detail::parse_natural(s, line, "agent");
  return static_cast<Agent>(v);
}

std::vector<Agent> parse_agent_list(const std::string& s, std::size_t line) {
  std::vector<Agent> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(parse_agent(s.substr(start, comma - start), line));
    start = comma + 1;
  }
  return out;
}

Justification parse_justification(const std::string& text, std::size_t line) {
  auto tok = tokens(text, line);
  if (tok.empty()) throw FormatError("missing justification", line);
  Justification j;
  const std::string& rule = tok[0];
  auto need = [&](std::size_t n) {
    if (tok.size() < n) throw FormatError("too few arguments for " + rule, line);
  };
  if (rule == "AX") {
    need(2);
    j.kind = Justification::Kind::Axiom;
    auto kind = schema_kind(tok[1]);
    if (!kind || *kind == SchemaKind::Custom) throw FormatError("unknown schema '" + tok[1] + "'", line);
    j.schema.kind = *kind;
    for (std::size_t k = 2; k < tok.size(); ++k) {
      auto eq = tok[k].find('=');
      if (eq == std::string::npos) throw FormatError("expected key=value, got '" + tok[k] + "'", line);
      std::string key = tok[k].substr(0, eq), value = unquote(tok[k].substr(eq + 1));
      if (key == "k") {
        j.schema.k = detail::parse_natural(value, line, "k");
      } else if (key == "i") {
        j.schema.i = parse_agent(value, line);
      } else if (key == "l") {
        j.schema.l = parse_agent(value, line);
      } else if (key == "m") {
        j.schema.m = parse_agent(value, line);
      } else if (key == "n") {
        j.schema.n = parse_agent(value, line);
      } else if (key == "agents") {
        j.schema.agents = parse_agent_list(value, line);
      } else {
        try {
          j.bindings.insert_or_assign(key, parse(value));
        } catch (const ParseError& e) {
          throw FormatError("slot " + key + ": " + e.what(), line);
        }
      }
    }
    return j;
  }
  if (rule == "MP") {
    if (tok.size() != 3) throw FormatError("MP takes two line labels", line);
    j.kind = Justification::Kind::MP;
    j.refs = {tok[1], tok[2]};
    return j;
  }
  if (rule == "NEC" || rule == "RK") {
    need(3);
    const bool nec = rule == "NEC";
    if (tok[1] == "box") {
      if (tok.size() != 3) throw FormatError(rule + " box takes one line label", line);
      j.kind = nec ? Justification::Kind::NecBox : Justification::Kind::RK;
      j.box = true;
      j.refs = {tok[2]};
    } else if (tok[1] == "agent") {
      if (tok.size() != 4) throw FormatError(rule + " agent takes an agent and one line label", line);
      j.kind = nec ? Justification::Kind::NecAgent : Justification::Kind::RK;
      j.agent = parse_agent(tok[2], line);
      j.refs = {tok[3]};
    } else {
      throw FormatError(rule + " expects 'box' or 'agent'", line);
    }
    return j;
  }
  if (rule == "PL") {
    j.kind = Justification::Kind::PL;
    j.refs.assign(tok.begin() + 1, tok.end());
    return j;
  }
  if (rule == "S5") {
    need(2);
    j.kind = Justification::Kind::S5;
    std::size_t start = 0;
    const std::string& ops = tok[1];
    while (start <= ops.size()) {
      auto comma = ops.find(',', start);
      if (comma == std::string::npos) comma = ops.size();
      std::string op = ops.substr(start, comma - start);
      if (op == "box")
        j.s5_box = true;
      else
        j.s5_agents.push_back(parse_agent(op, line));
      start = comma + 1;
    }
    j.refs.assign(tok.begin() + 2, tok.end());
    return j;
  }
  throw FormatError("unknown rule '" + rule + "'", line);
}

}  // namespace

Derivation parse_derivation(const std::string& text) {
  Derivation d;
  bool have_system = false;
  std::set<std::string> labels;
  for (const auto& [number, raw] : detail::content_lines(text)) {
    if (!have_system) {
      auto w = detail::words(raw);
      if (w.size() != 2 || w[0] != "system") throw FormatError("expected 'system NAME'", number);
      auto sys = system_from_name(w[1]);
      if (!sys) throw FormatError("unknown system '" + w[1] + "'", number);
      d.system = *sys;
      have_system = true;
      continue;
    }
    auto colon = raw.find(':');
    auto semi = raw.find(';');
    if (colon == std::string::npos || semi == std::string::npos || semi < colon)
      throw FormatError("expected 'LABEL: FORMULA ; JUSTIFICATION'", number);
    Line l;
    l.source_line = number;
    l.label = detail::trim(std::string_view(raw).substr(0, colon));
    if (l.label.empty() || l.label.find_first_of(" \t") != std::string::npos) throw FormatError("bad line label", number);
    if (!labels.insert(l.label).second) throw FormatError("duplicate label " + l.label, number);
    try {
      l.formula = parse(detail::trim(std::string_view(raw).substr(colon + 1, semi - colon - 1)));
    } catch (const ParseError& e) {
      throw FormatError(e.what(), number);
    }
    l.justification = parse_justification(detail::trim(std::string_view(raw).substr(semi + 1)), number);
    d.lines.push_back(std::move(l));
  }
  if (!have_system) throw FormatError("missing 'system' header", 1);
  return d;
}

// ---------------------------------------------------------------------------
// Checking.

namespace {

// (a -> b) as built by implies().
bool split_implication(const Formula& f, Formula& a, Formula& b) {
  if (f.op() != Op::Not || f.body().op() != Op::And) return false;
  const auto& inner = f.body();
  if (inner.rhs().op() != Op::Not) return false;
  a = inner.lhs();
  b = inner.rhs().body();
  return true;
}

class Checker {
 public:
  Checker(const Derivation& d, System sys) : d_(d), sys_(sys) {}

  CheckResult run() {
    for (std::size_t k = 0; k < d_.lines.size(); ++k) {
      const Line& line = d_.lines[k];
      std::string why = justify(k);
      if (!why.empty()) {
        CheckResult r;
        r.failed = k;
        r.label = line.label;
        r.message = "line " + line.label + ": " + why;
        return r;
      }
      seen_.emplace(line.label, k);
    }
    CheckResult r;
    r.accepted = true;
    return r;
  }

 private:
  const Derivation& d_;
  System sys_;
  std::map<std::string, std::size_t> seen_;

  const Formula* ref(const std::string& label, std::string& why) const {
    auto it = seen_.find(label);
    if (it == seen_.end()) {
      why = "reference " + label + " is not an earlier line";
      return nullptr;
    }
    return &d_.lines[it->second].formula;
  }

  std::string justify(std::size_t k) {
    const Line& line = d_.lines[k];
    const Justification& j = line.justification;
    const Formula& f = line.formula;
    std::string why;
    std::vector<Formula> cited;
    for (const auto& r : j.refs) {
      auto p = ref(r, why);
      if (!p) return why;
      cited.push_back(*p);
    }
    switch (j.kind) {
      case Justification::Kind::Axiom: {
        if (!admits(sys_, j.schema.kind))
          return "schema " + to_string(j.schema.kind) + " is not part of " + to_string(sys_);
        Formula inst = f;
        try {
          inst = instantiate(j.schema, j.bindings);
        } catch (const AxiomError& e) {
          return e.what();
        }
        if (inst != f) return "formula is not the instance of " + describe(j.schema) + ", expected " + print(inst, PrintStyle::Sugared);
        return {};
      }
      case Justification::Kind::MP: {
        Formula a = f, b = f;
        for (int order = 0; order < 2; ++order) {
          const Formula& minor = cited[order];
          const Formula& major = cited[1 - order];
          if (split_implication(major, a, b) && a == minor && b == f) return {};
        }
        return "modus ponens shape mismatch";
      }
      case Justification::Kind::NecBox:
        if (f != box(cited[0])) return "not the box of the cited line";
        return {};
      case Justification::Kind::NecAgent:
        if (sys_ != System::Gperm) return "[i]-necessitation is not a rule of " + to_string(sys_);
        if (f != cstit(j.agent, cited[0])) return "not [" + std::to_string(j.agent) + "] of the cited line";
        return {};
      case Justification::Kind::RK: {
        Formula a = f, b = f;
        if (!split_implication(cited[0], a, b)) return "RK needs an implication";
        auto nec = [&](const Formula& x) { return j.box ? box(x) : cstit(j.agent, x); };
        auto pos = [&](const Formula& x) { return j.box ? diamond(x) : poss(j.agent, x); };
        if (f == implies(nec(a), nec(b)) || f == implies(pos(a), pos(b))) return {};
        return "not the monotonicity image of the cited implication";
      }
      case Justification::Kind::PL:
        try {
          if (!propositional_consequence(cited, f)) return "not a propositional consequence of the cited lines";
        } catch (const AxiomError& e) {
          return e.what();
        }
        return {};
      case Justification::Kind::S5: {
        if (j.s5_box && sys_ == System::Gperm) return "S5 for the box is not primitive in " + to_string(sys_);
        try {
          if (!s5_consequence(cited, f, j.s5_box, j.s5_agents, admits(sys_, SchemaKind::InclBox))) return "not an S5 consequence of the cited lines";
        } catch (const AxiomError& e) {
          return e.what();
        }
        return {};
      }
    }
    return "unknown justification";
  }
};

}  // namespace

CheckResult check(const Derivation& d) { return check(d, d.system); }

CheckResult check(const Derivation& d, System system) { return Checker(d, system).run(); }

}  // namespace stitkit::axioms
