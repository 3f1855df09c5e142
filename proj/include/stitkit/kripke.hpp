#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stitkit/partition.hpp"
#include "stitkit/syntax.hpp"

namespace stitkit::kripke {

using World = std::size_t;

// Dense binary relation on {0..n-1}. Used for adversarial inputs that need not be equivalences;
// well-formed models store equivalence classes only.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n) : n_(n), bits_(n * n, 0) {}
  static Relation identity(std::size_t n);
  static Relation universal(std::size_t n);
  static Relation from_partition(const Partition& p);

  std::size_t size() const noexcept { return n_; }
  bool contains(World w, World v) const { return bits_[w * n_ + v] != 0; }
  void insert(World w, World v) { bits_[w * n_ + v] = 1; }

  // {(w,v) : w this u and u other v, some u}
  Relation then(const Relation& other) const;
  Relation united(const Relation& other) const;
  Relation reflexive_transitive_closure() const;
  Relation restrict(const std::vector<World>& keep) const;
  bool subset_of(const Relation& other) const;

  bool reflexive() const;
  bool symmetric() const;
  bool transitive() const;
  bool equivalence() const { return reflexive() && symmetric() && transitive(); }
  // Classes, when the relation is an equivalence.
  std::optional<Partition> classes() const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<unsigned char> bits_;
};

struct KripkeModel {
  std::vector<std::string> worlds;
  std::map<Agent, Relation> relations;
  // Explicit historic-necessity classes. When absent, R_box is the closure of the stored relations.
  std::optional<Relation> box;
  std::map<std::string, std::vector<bool>> valuation;
  Agent agent_universe = 1;

  std::size_t size() const noexcept { return worlds.size(); }
  std::optional<World> find_world(const std::string& name) const;
  bool holds(const std::string& atom, World w) const;

  Relation moment_relation() const;
  // Stored relation, or the moment relation for padded agents.
  Relation relation(Agent i) const;
  // Relation used for []: R_1 then R_0 when there are at least two agents.
  Relation box_relation() const;
};

struct GppViolation {
  World w;
  World v;
  Agent l;
  Agent m;
  Agent n;
};

struct Violation {
  std::string condition;
  std::string detail;
};

// Throws ModelError when a stored relation is not an equivalence.
std::vector<GppViolation> check_gpp(const KripkeModel& m);
// Every well-formedness condition, including GPP; empty iff the model is usable.
std::vector<Violation> validate(const KripkeModel& m);

// Extension-based checker; construct once per model and evaluate many formulas.
class Checker {
 public:
  explicit Checker(const KripkeModel& m);
  std::vector<bool> extension(const Formula& f) const;
  bool holds(World w, const Formula& f) const;

 private:
  const KripkeModel* model_;
  std::size_t n_;
  Relation box_;
  mutable std::map<Agent, Relation> agent_cache_;
  const Relation& agent_relation(Agent i) const;
};

bool mc(const KripkeModel& m, World w, const Formula& f);
bool mc(const KripkeModel& m, const std::string& world, const Formula& f);
std::vector<bool> extension(const KripkeModel& m, const Formula& f);

KripkeModel generated_submodel(const KripkeModel& m, World w);
// Throws ModelError if the precondition (generated, GPP) fails.
KripkeModel filtrate(const KripkeModel& m, const Formula& f);

struct MomentModel {
  std::vector<std::string> worlds;
  std::map<Agent, Partition> partitions;
  std::map<std::string, std::vector<bool>> valuation;
  Agent agent_universe = 1;

  std::size_t size() const noexcept { return worlds.size(); }
  std::optional<World> find_world(const std::string& name) const;
};

// One cell index per stored agent (map order) whose intersection is empty, or nullopt.
std::optional<std::vector<std::size_t>> rectangularity_violation(const MomentModel& m);
// Throws ModelError on a rectangularity violation or malformed partitions.
KripkeModel moment_to_kripke(const MomentModel& m);
bool mc(const MomentModel& m, World w, const Formula& f);

// Valuation-free frames with at most max_worlds worlds whose relations for agents 0..stored-1 are
// equivalences passing validate(); agent_universe = universe. For a single stored agent with
// universe 1 an explicit box coarser than R_0 is enumerated as well.
void enumerate_frames(std::size_t max_worlds, std::size_t stored, Agent universe,
                      const std::function<bool(const KripkeModel&)>& visit);

// Text formats.
using AnyModel = std::variant<KripkeModel, MomentModel>;
AnyModel read_model(const std::string& text);
std::string write_model(const KripkeModel& m);
std::string write_model(const MomentModel& m);

}  // namespace stitkit::kripke
