#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stitkit/error.hpp"
#include "stitkit/syntax.hpp"

namespace stitkit::axioms {

class AxiomError : public Error {
 public:
  using Error::Error;
};

enum class SchemaKind {
  S5BoxK,
  S5BoxT,
  S5Box5,
  S5iK,
  S5iT,
  S5i5,
  InclBox,
  AIA,
  AAIA,
  GPerm,
  DefBox,
  Perm01,
  ChurchRosser,
  Custom,
};

std::string to_string(SchemaKind kind);
std::optional<SchemaKind> schema_kind(const std::string& name);

struct Schema {
  SchemaKind kind = SchemaKind::S5BoxT;
  std::size_t k = 0;
  Agent i = 0;  // S5i-*, InclBox
  Agent l = 0, m = 0, n = 0;  // GPerm
  // AIA over the listed pairwise distinct agents instead of 0..k.
  std::vector<Agent> agents;
  // Custom schemas: a template whose atoms named in `custom_slots` are the slots.
  std::optional<Formula> custom;
  std::vector<std::string> custom_slots;
  std::string custom_name;
};

std::string describe(const Schema& s);

using Bindings = std::map<std::string, Formula>;

std::vector<std::string> slots(const Schema& s);
// Throws AxiomError on missing or unknown slots and on out-of-range parameters.
Formula instantiate(const Schema& s, const Bindings& bindings);

enum class System { Xu, Aaia, Gperm };

std::string to_string(System s);
std::optional<System> system_from_name(const std::string& name);
bool admits(System sys, SchemaKind kind);

struct Justification {
  enum class Kind { Axiom, MP, NecBox, NecAgent, PL, RK, S5 };
  Kind kind = Kind::PL;
  Schema schema;
  Bindings bindings;
  std::vector<std::string> refs;
  Agent agent = 0;
  bool box = false;  // RK: box or agent
  // S5: modalities treated as S5; non-listed ones are opaque.
  bool s5_box = false;
  std::vector<Agent> s5_agents;
};

struct Line {
  std::string label;
  Formula formula = atom("p");
  Justification justification;
  std::size_t source_line = 0;
};

struct Derivation {
  System system = System::Xu;
  std::vector<Line> lines;
};

// Line-oriented text format; throws FormatError with the file line number.
Derivation parse_derivation(const std::string& text);

struct CheckResult {
  bool accepted = false;
  std::optional<std::size_t> failed;  // index into lines
  std::string label;
  std::string message;
};

CheckResult check(const Derivation& d);
CheckResult check(const Derivation& d, System system);

// Propositional consequence with modal subformulas as atoms.
bool propositional_consequence(const std::vector<Formula>& premises, const Formula& goal);
// Global consequence in the fusion of S5 modalities listed; other modal formulas are opaque.
// With inclusion, every listed agent's cells also lie inside box cells, as []f -> [i]f demands.
bool s5_consequence(const std::vector<Formula>& premises, const Formula& goal, bool box, const std::vector<Agent>& agents,
                    bool inclusion = false);

enum class ModelSource { Btac, Kripke };

std::string to_string(ModelSource s);

struct AuditBounds {
  std::size_t max_moments = 2;
  std::size_t max_histories = 4;
  std::size_t max_worlds = 4;
  Agent agents = 3;
};

struct Counterexample {
  std::string schema;
  Formula instance = atom("p");
  std::string model;  // model in its text format, valuation included
  std::string index;  // "moment/history" or world name
};

struct AuditReport {
  std::size_t schemas = 0;
  std::size_t instances = 0;
  std::size_t structures = 0;
  std::size_t evaluations = 0;
  std::size_t failures = 0;  // failing evaluations, including those beyond the reported counterexamples
  std::vector<Counterexample> counterexamples;
  bool ok() const { return failures == 0; }
};

// Twenty small formulas over p and q used as slot fillers.
std::vector<Formula> default_grid();

// Every instance with slots filled from grid (all tuples) is evaluated in every model up to the bounds.
AuditReport semantic_audit(const std::vector<Schema>& schemas, const std::vector<Formula>& grid, ModelSource source,
                           const AuditBounds& bounds = {}, std::size_t max_counterexamples = 5);

}  // namespace stitkit::axioms
