#include "stitkit/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "stitkit/axioms.hpp"
#include "stitkit/btac.hpp"
#include "stitkit/kripke.hpp"
#include "stitkit/solver.hpp"
#include "stitkit/syntax.hpp"
#include "stitkit/translate.hpp"
#include "text_util.hpp"

namespace stitkit::cli {
namespace {

using json = nlohmann::ordered_json;

// Bad invocation or unreadable input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Formula parse_formula(const std::string& text) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw UsageError("formula: " + std::string(e.what()) + " at offset " + std::to_string(e.position()));
  }
}

std::string join(const std::set<Agent>& xs) {
  std::string s;
  for (auto a : xs) s += (s.empty() ? "" : " ") + std::to_string(a);
  return s.empty() ? "none" : s;
}

std::string join(const std::set<std::string>& xs) {
  std::string s;
  for (const auto& a : xs) s += (s.empty() ? "" : " ") + a;
  return s.empty() ? "none" : s;
}

std::vector<std::string> languages(const Formula& f) {
  std::vector<std::string> out;
  if (in_language(f, LanguageTag::Cstit)) out.push_back("cstit");
  if (in_language(f, LanguageTag::Dstit)) out.push_back("dstit");
  if (out.empty()) out.push_back("mixed");
  return out;
}

struct LoadedModel {
  std::variant<btac::BtacModel, kripke::KripkeModel, kripke::MomentModel> model;
};

LoadedModel load_model(const std::string& path) {
  const auto text = read_file(path);
  try {
    const auto lines = detail::content_lines(text);
    if (!lines.empty() && detail::words(lines.front().text).front() == "btac") {
      auto m = btac::read_model(text);
      if (auto v = btac::validate_model(m); !v.empty())
        throw UsageError(path + ": invalid model: " + v.front().condition + " (" + v.front().detail + ")");
      return {std::move(m)};
    }
    auto any = kripke::read_model(text);
    if (auto* k = std::get_if<kripke::KripkeModel>(&any)) {
      if (auto v = kripke::validate(*k); !v.empty())
        throw UsageError(path + ": invalid model: " + v.front().condition + " (" + v.front().detail + ")");
      return {std::move(*k)};
    }
    auto& mm = std::get<kripke::MomentModel>(any);
    if (kripke::rectangularity_violation(mm)) throw UsageError(path + ": invalid model: cells do not intersect");
    return {std::move(mm)};
  } catch (const FormatError& e) {
    throw UsageError(path + ":" + std::to_string(e.line()) + ": " + e.what());
  }
}

kripke::World world_named(const std::vector<std::string>& worlds, const std::string& name) {
  for (kripke::World w = 0; w < worlds.size(); ++w)
    if (worlds[w] == name) return w;
  throw UsageError("unknown world '" + name + "'");
}

json stats_json(const solver::SatStats& s) {
  json j;
  j["engine"] = s.engine;
  j["bound_exponent"] = s.bound_exponent;
  j["bound_used"] = s.bound_used ? json(*s.bound_used) : json(nullptr);
  j["box_candidates"] = s.box_candidates;
  j["points"] = s.points;
  j["families"] = s.families;
  j["models_explored"] = s.models_explored;
  j["exhausted"] = s.exhausted;
  j["bounded_unsat"] = s.bounded_unsat;
  j["witness_worlds"] = s.witness_worlds;
  if (s.kripke_class_verdict) j["kripke_class_verdict"] = solver::to_string(*s.kripke_class_verdict);
  return j;
}

std::string stats_text(const solver::SatStats& s) {
  std::ostringstream o;
  o << "stats: engine=" << s.engine << " bound=2^" << s.bound_exponent;
  if (s.bound_used) o << " bound_used=" << *s.bound_used;
  o << " box_candidates=" << s.box_candidates << " points=" << s.points << " families=" << s.families
    << " models=" << s.models_explored << " exhausted=" << (s.exhausted ? "yes" : "no");
  if (s.bounded_unsat) o << " bounded_unsat=yes";
  if (s.witness_worlds) o << " witness_worlds=" << s.witness_worlds;
  if (s.kripke_class_verdict) o << " kripke_class=" << solver::to_string(*s.kripke_class_verdict);
  return o.str();
}

struct Options {
  bool json = false;
  unsigned threads = 1;

  std::string formula;
  std::string file;
  std::optional<Agent> agents;
  std::optional<std::uint64_t> bound;
  std::string engine = "search";
  std::uint64_t timeout_ms = 0;
  bool single_agent = false;
  std::string at;
  std::string to;
  std::size_t max_worlds = 4;
  std::string system;

  std::string name;
  std::optional<std::size_t> k;
  std::optional<Agent> i, l, m, n;
  std::vector<Agent> agent_list;
  std::vector<std::string> binds;

  std::vector<std::string> schemas;
  std::string template_text;
  std::string models = "kripke";
  std::vector<std::string> max;
  std::size_t max_counterexamples = 5;
};

class Runner {
 public:
  Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  int parse_cmd() {
    const auto f = parse_formula(o_.formula);
    const auto sf = subformulas(f).size();
    if (o_.json) {
      emit({{"command", "parse"},
            {"formula", print(f)},
            {"sugared", print(f, PrintStyle::Sugared)},
            {"length", length(f)},
            {"subformulas", sf},
            {"agents", agents(f)},
            {"atoms", atoms(f)},
            {"language", languages(f)}});
    } else {
      out_ << "formula: " << print(f) << "\n"
           << "sugared: " << print(f, PrintStyle::Sugared) << "\n"
           << "length: " << length(f) << "\n"
           << "subformulas: " << sf << "\n"
           << "agents: " << join(agents(f)) << "\n"
           << "atoms: " << join(atoms(f)) << "\n"
           << "language:";
      for (const auto& l : languages(f)) out_ << " " << l;
      out_ << "\n";
    }
    return kAffirmative;
  }

  int check_cmd() {
    const auto f = parse_formula(o_.formula);
    auto loaded = load_model(o_.file);
    bool truth = false;
    try {
      if (auto* b = std::get_if<btac::BtacModel>(&loaded.model)) {
        truth = btac::eval(*b, btac::parse_index(*b, o_.at), f);
      } else if (auto* k = std::get_if<kripke::KripkeModel>(&loaded.model)) {
        truth = kripke::mc(*k, world_named(k->worlds, o_.at), f);
      } else {
        auto& mm = std::get<kripke::MomentModel>(loaded.model);
        truth = kripke::mc(mm, world_named(mm.worlds, o_.at), f);
      }
    } catch (const ModelError& e) {
      throw UsageError(e.what());
    }
    if (o_.json)
      emit({{"command", "check"}, {"formula", print(f)}, {"index", o_.at}, {"truth", truth}});
    else
      out_ << (truth ? "TRUE" : "FALSE") << " at " << o_.at << "\n";
    return truth ? kAffirmative : kNegative;
  }

  solver::SolverConfig config() const {
    solver::SolverConfig cfg;
    if (!o_.agents) throw UsageError("--agents is required: verdicts depend on the agent universe");
    cfg.agent_universe = *o_.agents;
    cfg.world_bound_override = o_.bound;
    cfg.engine = o_.engine == "oracle" ? solver::Engine::Oracle : solver::Engine::Search;
    cfg.timeout = std::chrono::milliseconds(o_.timeout_ms);
    cfg.threads = o_.threads;
    return cfg;
  }

  template <typename Fn>
  int solve(const std::string& command, Fn&& on_result) {
    try {
      return on_result();
    } catch (const solver::SolverError& e) {
      using K = solver::SolverError::Kind;
      if (e.kind() == K::InvalidInput || e.kind() == K::CapExceeded) throw UsageError(e.what());
      const std::string label = e.kind() == K::BoundViolation ? "BOUND-VIOLATION" : "INCONCLUSIVE";
      if (o_.json) {
        emit({{"command", command}, {"verdict", label}, {"reason", e.what()}, {"stats", stats_json(e.stats())}});
      } else {
        out_ << label << ": " << e.what() << "\n" << stats_text(e.stats()) << "\n";
      }
      return kInconclusive;
    }
  }

  void report_model(const std::string& command, const std::string& verdict, const Formula& f,
                    const solver::SatResult& r, const std::string& model_key) {
    if (o_.json) {
      json j{{"command", command}, {"formula", print(f)}, {"verdict", verdict}, {"stats", stats_json(r.stats)}};
      if (r.witness) {
        j[model_key] = kripke::write_model(*r.witness);
        j["world"] = r.witness->worlds.at(*r.witness_world);
      }
      emit(j);
      return;
    }
    out_ << verdict << "\n";
    if (r.witness) {
      out_ << model_key << " at " << r.witness->worlds.at(*r.witness_world) << ":\n"
           << kripke::write_model(*r.witness);
    }
    out_ << stats_text(r.stats) << "\n";
  }

  int sat_cmd() {
    const auto f = parse_formula(o_.formula);
    const auto cfg = config();
    return solve("sat", [&] {
      const auto r = o_.single_agent ? solver::sat_single_agent(f, cfg) : solver::sat(f, cfg);
      const bool yes = r.verdict == solver::Verdict::Sat;
      report_model("sat", yes ? "SAT" : "UNSAT", f, r, "witness");
      return yes ? kAffirmative : kNegative;
    });
  }

  int valid_cmd() {
    const auto f = parse_formula(o_.formula);
    const auto cfg = config();
    return solve("valid", [&] {
      const auto r = solver::sat(neg(f), cfg);
      const bool yes = r.verdict == solver::Verdict::Unsat;
      report_model("valid", yes ? "VALID" : "NOT-VALID", f, r, "countermodel");
      return yes ? kAffirmative : kNegative;
    });
  }

  int oracle_cmd() {
    const auto f = parse_formula(o_.formula);
    solver::SolverConfig cfg;
    const auto ags = agents(f);
    cfg.agent_universe = o_.agents ? *o_.agents : (ags.empty() ? 1 : *ags.rbegin() + 1);
    cfg.threads = o_.threads;
    return solve("oracle", [&] {
      const auto r = solver::oracle(f, o_.max_worlds, cfg);
      const bool yes = r.verdict == solver::Verdict::Sat;
      report_model("oracle", yes ? "SAT" : "UNSAT", f, r, "witness");
      return yes ? kAffirmative : kNegative;
    });
  }

  int translate_cmd() {
    const auto f = parse_formula(o_.formula);
    const auto dir = o_.to == "cstit" ? translate::Direction::ToCstit : translate::Direction::ToDstit;
    translate::Translation t = [&] {
      try {
        return translate::translate(f, dir);
      } catch (const translate::TranslateError& e) {
        throw UsageError(e.what());
      }
    }();
    if (o_.json) {
      json table = json::array();
      for (const auto& [sub, name] : t.table.entries()) table.push_back({{"atom", name}, {"subformula", print(sub)}});
      emit({{"command", "translate"},
            {"to", o_.to},
            {"formula", print(t.formula, PrintStyle::Sugared)},
            {"input_length", length(f)},
            {"surface_length", t.surface_length},
            {"primitive_length", t.primitive_length},
            {"table", table}});
    } else {
      out_ << print(t.formula, PrintStyle::Sugared) << "\n";
    }
    return kAffirmative;
  }

  int filter_cmd() {
    const auto f = parse_formula(o_.formula);
    auto loaded = load_model(o_.file);
    kripke::KripkeModel m;
    if (auto* k = std::get_if<kripke::KripkeModel>(&loaded.model))
      m = *k;
    else if (auto* mm = std::get_if<kripke::MomentModel>(&loaded.model))
      m = kripke::moment_to_kripke(*mm);
    else
      throw UsageError("filter needs a kripke or moment model");
    try {
      if (!o_.at.empty()) m = kripke::generated_submodel(m, world_named(m.worlds, o_.at));
      const auto filtered = kripke::filtrate(m, f);
      const auto text = kripke::write_model(filtered);
      if (o_.json)
        emit({{"command", "filter"}, {"worlds", filtered.size()}, {"model", text}});
      else
        out_ << text;
    } catch (const ModelError& e) {
      throw UsageError(e.what());
    }
    return kAffirmative;
  }

  int prove_cmd() {
    axioms::Derivation d;
    try {
      d = axioms::parse_derivation(read_file(o_.file));
    } catch (const FormatError& e) {
      throw UsageError(o_.file + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    auto system = d.system;
    if (!o_.system.empty()) {
      auto s = axioms::system_from_name(o_.system);
      if (!s) throw UsageError("unknown system '" + o_.system + "'");
      system = *s;
    }
    const auto r = axioms::check(d, system);
    if (o_.json) {
      json j{{"command", "prove"}, {"system", axioms::to_string(system)}, {"lines", d.lines.size()},
             {"accepted", r.accepted}};
      if (!r.accepted) {
        j["line"] = r.label;
        j["message"] = r.message;
      }
      emit(j);
    } else if (r.accepted) {
      out_ << "ACCEPTED " << d.lines.size() << " lines in " << axioms::to_string(system) << "\n";
      if (!d.lines.empty()) out_ << "conclusion: " << print(d.lines.back().formula, PrintStyle::Sugared) << "\n";
    } else {
      out_ << "REJECTED " << r.message << "\n";
    }
    return r.accepted ? kAffirmative : kNegative;
  }

  axioms::Schema schema_named(const std::string& name) const {
    auto kind = axioms::schema_kind(name);
    if (!kind || *kind == axioms::SchemaKind::Custom) throw UsageError("unknown schema '" + name + "'");
    axioms::Schema s;
    s.kind = *kind;
    if (o_.k) s.k = *o_.k;
    if (o_.i) s.i = *o_.i;
    if (o_.l) s.l = *o_.l;
    if (o_.m) s.m = *o_.m;
    if (o_.n) s.n = *o_.n;
    s.agents = o_.agent_list;
    return s;
  }

  int axiom_cmd() {
    auto s = schema_named(o_.name);
    if (!o_.k && (s.kind == axioms::SchemaKind::AIA || s.kind == axioms::SchemaKind::AAIA)) s.k = 1;
    axioms::Bindings b;
    for (const auto& bind : o_.binds) {
      const auto eq = bind.find('=');
      if (eq == std::string::npos) throw UsageError("--bind expects slot=FORMULA, got '" + bind + "'");
      b.insert_or_assign(detail::trim(bind.substr(0, eq)), parse_formula(bind.substr(eq + 1)));
    }
    Formula inst = atom("p");
    try {
      inst = axioms::instantiate(s, b);
    } catch (const axioms::AxiomError& e) {
      std::string need;
      for (const auto& slot : axioms::slots(s)) need += " " + slot;
      throw UsageError(std::string(e.what()) + " (slots:" + need + ")");
    }
    if (o_.json)
      emit({{"command", "axiom"}, {"schema", axioms::describe(s)}, {"instance", print(inst, PrintStyle::Sugared)},
            {"length", length(inst)}});
    else
      out_ << print(inst, PrintStyle::Sugared) << "\n";
    return kAffirmative;
  }

  axioms::AuditBounds bounds() const {
    axioms::AuditBounds b;
    for (const auto& kv : o_.max) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--max expects key=value, got '" + kv + "'");
      const auto key = detail::trim(kv.substr(0, eq));
      std::size_t v = 0;
      try {
        v = detail::parse_natural(detail::trim(kv.substr(eq + 1)), 0, "bound");
      } catch (const FormatError& e) {
        throw UsageError(std::string("--max ") + e.what());
      }
      if (key == "moments") b.max_moments = v;
      else if (key == "histories") b.max_histories = v;
      else if (key == "worlds") b.max_worlds = v;
      else if (key == "agents") b.agents = static_cast<Agent>(v);
      else throw UsageError("--max keys are moments, histories, worlds and agents; got '" + key + "'");
    }
    return b;
  }

  // Parameters left open on the command line range over every value the bounds allow.
  std::vector<axioms::Schema> sweep_schemas(Agent agent_count) const {
    using SK = axioms::SchemaKind;
    std::vector<axioms::Schema> out;
    if (!o_.template_text.empty()) {
      axioms::Schema c;
      c.kind = SK::Custom;
      c.custom = parse_formula(o_.template_text);
      for (const auto& a : atoms(*c.custom)) c.custom_slots.push_back(a);
      c.custom_name = "template";
      out.push_back(c);
    }
    auto range = [](std::optional<Agent> fixed, Agent hi) {
      std::vector<Agent> r;
      if (fixed) r.push_back(*fixed);
      else
        for (Agent a = 0; a < hi; ++a) r.push_back(a);
      return r;
    };
    for (const auto& name : o_.schemas) {
      const auto base = schema_named(name);
      std::vector<std::size_t> ks;
      if (o_.k) ks.push_back(*o_.k);
      else if (base.kind == SK::AIA || base.kind == SK::AAIA)
        for (std::size_t k = 1; k < agent_count && k <= 2; ++k) ks.push_back(k);
      else if (base.kind == SK::GPerm)
        for (std::size_t k = 0; k <= 2; ++k) ks.push_back(k);
      else ks.push_back(0);
      for (auto k : ks) {
        auto s = base;
        s.k = k;
        if (s.kind == SK::GPerm) {
          for (auto l : range(o_.l, agent_count))
            for (auto m : range(o_.m, agent_count))
              for (auto n : range(o_.n, agent_count)) {
                s.l = l;
                s.m = m;
                s.n = n;
                out.push_back(s);
              }
        } else if (s.kind == SK::S5iK || s.kind == SK::S5iT || s.kind == SK::S5i5 || s.kind == SK::InclBox) {
          for (auto i : range(o_.i, agent_count)) {
            s.i = i;
            out.push_back(s);
          }
        } else {
          out.push_back(s);
        }
      }
    }
    if (out.empty()) throw UsageError("sweep needs --schema or --template");
    return out;
  }

  int sweep_cmd() {
    const auto b = bounds();
    const auto source = o_.models == "btac" ? axioms::ModelSource::Btac : axioms::ModelSource::Kripke;
    const auto schemas = sweep_schemas(b.agents);
    axioms::AuditReport r;
    try {
      r = axioms::semantic_audit(schemas, axioms::default_grid(), source, b, o_.max_counterexamples);
    } catch (const axioms::AxiomError& e) {
      throw UsageError(e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (o_.json) {
      json ces = json::array();
      for (const auto& c : r.counterexamples)
        ces.push_back({{"schema", c.schema}, {"instance", print(c.instance, PrintStyle::Sugared)},
                       {"index", c.index}, {"model", c.model}});
      emit({{"command", "sweep"}, {"models", o_.models}, {"schemas", r.schemas}, {"instances", r.instances},
            {"structures", r.structures}, {"evaluations", r.evaluations}, {"failures", r.failures}, {"ok", r.ok()},
            {"counterexamples", ces}});
    } else {
      out_ << "schemas=" << r.schemas << " instances=" << r.instances << " structures=" << r.structures
           << " evaluations=" << r.evaluations << " failures=" << r.failures << "\n";
      for (const auto& c : r.counterexamples)
        out_ << "COUNTEREXAMPLE " << c.schema << ": " << print(c.instance, PrintStyle::Sugared) << " fails at "
             << c.index << "\n"
             << c.model;
      if (r.ok()) out_ << "OK\n";
    }
    return r.ok() ? kAffirmative : kNegative;
  }

 private:
  void emit(const json& j) { out_ << j.dump(2) << "\n"; }

  const Options& o_;
  std::ostream& out_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"stitkit: decision procedures for the logics of agency"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", o.json, "Emit a machine-readable report");
  app.add_option("--threads", o.threads, "Solver worker threads")->check(CLI::Range(1u, 256u));

  auto* parse_c = app.add_subcommand("parse", "Echo the canonical form, length, subformula count and agents");
  parse_c->add_option("formula", o.formula)->required();

  auto* check_c = app.add_subcommand("check", "Evaluate a formula at an index of a model file");
  check_c->add_option("model", o.file)->required();
  check_c->add_option("formula", o.formula)->required();
  check_c->add_option("--at", o.at, "moment/history or world name")->required();

  auto add_solver_flags = [&](CLI::App* c) {
    c->add_option("formula", o.formula)->required();
    c->add_option("--agents", o.agents, "Size of the agent universe");
    c->add_option("--bound", o.bound, "Largest witness accepted, or oracle world cap");
    c->add_option("--engine", o.engine)->check(CLI::IsMember({"search", "oracle"}));
    c->add_option("--timeout", o.timeout_ms, "Milliseconds, 0 for none");
  };
  auto* sat_c = app.add_subcommand("sat", "Decide satisfiability");
  add_solver_flags(sat_c);
  sat_c->add_flag("--single-agent", o.single_agent, "Check the witness against the quadratic bound");
  auto* valid_c = app.add_subcommand("valid", "Decide validity");
  add_solver_flags(valid_c);

  auto* translate_c = app.add_subcommand("translate", "Translate between the CSTIT and DSTIT languages");
  translate_c->add_option("formula", o.formula)->required();
  translate_c->add_option("--to", o.to)->required()->check(CLI::IsMember({"cstit", "dstit"}));

  auto* filter_c = app.add_subcommand("filter", "Print the filtration of a model through a formula");
  filter_c->add_option("model", o.file)->required();
  filter_c->add_option("formula", o.formula)->required();
  filter_c->add_option("--at", o.at, "Filtrate the submodel generated by this world");

  auto* prove_c = app.add_subcommand("prove", "Check a derivation file");
  prove_c->add_option("derivation", o.file)->required();
  prove_c->add_option("--system", o.system, "Override the file's system");

  auto add_schema_params = [&](CLI::App* c) {
    c->add_option("--k", o.k);
    c->add_option("--i", o.i);
    c->add_option("--l", o.l);
    c->add_option("--m", o.m);
    c->add_option("--n", o.n);
  };
  auto* axiom_c = app.add_subcommand("axiom", "Print an instance of an axiom schema");
  axiom_c->add_option("name", o.name)->required();
  add_schema_params(axiom_c);
  axiom_c->add_option("--agent-list", o.agent_list, "Agents of an AIA instance")->delimiter(',');
  axiom_c->add_option("--bind", o.binds, "slot=FORMULA");

  auto* oracle_c = app.add_subcommand("oracle", "Exhaustive small-model search");
  oracle_c->add_option("formula", o.formula)->required();
  oracle_c->add_option("--max-worlds", o.max_worlds)->check(CLI::PositiveNumber);
  oracle_c->add_option("--agents", o.agents, "Defaults to one more than the largest agent");

  auto* sweep_c = app.add_subcommand("sweep", "Check schema instances in every enumerated model");
  sweep_c->add_option("--schema", o.schemas, "Schema name, repeatable");
  sweep_c->add_option("--template", o.template_text, "Ad hoc schema; its atoms are the slots");
  sweep_c->add_option("--models", o.models)->check(CLI::IsMember({"btac", "kripke"}));
  sweep_c->add_option("--max", o.max, "moments=N, histories=N, worlds=N or agents=N");
  sweep_c->add_option("--max-counterexamples", o.max_counterexamples);
  add_schema_params(sweep_c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kAffirmative;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kAffirmative;
  } catch (const CLI::ParseError& e) {
    err << "stitkit: " << e.what() << "\n";
    return kUsage;
  }

  Runner r(o, out);
  try {
    if (parse_c->parsed()) return r.parse_cmd();
    if (check_c->parsed()) return r.check_cmd();
    if (sat_c->parsed()) return r.sat_cmd();
    if (valid_c->parsed()) return r.valid_cmd();
    if (translate_c->parsed()) return r.translate_cmd();
    if (filter_c->parsed()) return r.filter_cmd();
    if (prove_c->parsed()) return r.prove_cmd();
    if (axiom_c->parsed()) return r.axiom_cmd();
    if (oracle_c->parsed()) return r.oracle_cmd();
    if (sweep_c->parsed()) return r.sweep_cmd();
  } catch (const UsageError& e) {
    err << "stitkit: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "stitkit: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace stitkit::cli
