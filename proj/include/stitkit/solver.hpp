#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "stitkit/kripke.hpp"
#include "stitkit/syntax.hpp"

namespace stitkit::solver {

enum class Verdict { Sat, Unsat };
enum class Engine { Search, Oracle };

std::string to_string(Verdict v);
std::string to_string(Engine e);

struct SolverConfig {
  Agent agent_universe = 1;
  // Witnesses larger than this make a SAT answer inconclusive; for the oracle engine it caps the
  // world count searched.
  std::optional<std::uint64_t> world_bound_override;
  Engine engine = Engine::Search;
  std::chrono::milliseconds timeout{0};  // zero means no limit
  unsigned threads = 1;
};

struct SatStats {
  std::string engine;
  // The theoretical world bound is 2^bound_exponent (the length of the formula).
  std::uint64_t bound_exponent = 0;
  // Largest model size the run is known to have covered; absent when the whole bound was covered.
  std::optional<std::uint64_t> bound_used;
  std::uint64_t box_candidates = 0;
  std::uint64_t points = 0;
  std::uint64_t families = 0;
  std::uint64_t models_explored = 0;
  bool exhausted = false;
  bool bounded_unsat = false;
  std::size_t witness_worlds = 0;
  std::optional<Verdict> kripke_class_verdict;
};

struct SatResult {
  Verdict verdict = Verdict::Unsat;
  std::optional<kripke::MomentModel> witness;
  std::optional<kripke::World> witness_world;
  SatStats stats;
};

class SolverError : public Error {
 public:
  enum class Kind { InvalidInput, Timeout, Inconclusive, CapExceeded, BoundViolation };
  SolverError(Kind kind, const std::string& message, SatStats stats = {})
      : Error(message), kind_(kind), stats_(std::move(stats)) {}
  Kind kind() const noexcept { return kind_; }
  const SatStats& stats() const noexcept { return stats_; }

 private:
  Kind kind_;
  SatStats stats_;
};

SatResult sat(const Formula& f, const SolverConfig& cfg);
bool valid(const Formula& f, const SolverConfig& cfg);
// Agents must be within {0} and agent_universe must be 1; witnesses are checked against length(f)^2.
SatResult sat_single_agent(const Formula& f, const SolverConfig& cfg);

// Exhaustive search over moment models and, separately, Kripke GPP models with at most max_worlds worlds.
SatResult oracle(const Formula& f, std::size_t max_worlds, const SolverConfig& cfg);
// Largest max_worlds the oracle accepts (STITKIT_MAX_ORACLE, default 5, hard ceiling 7).
std::size_t oracle_world_cap();
constexpr std::size_t kOracleMaxLength = 512;
constexpr std::size_t kOracleMaxAtoms = 48;

}  // namespace stitkit::solver
