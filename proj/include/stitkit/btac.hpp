#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stitkit/syntax.hpp"

namespace stitkit::btac {

using MomentId = std::size_t;
using HistoryId = std::size_t;
using Cells = std::vector<std::vector<HistoryId>>;

struct Moment {
  std::string name;
  std::optional<MomentId> parent;
};

struct Index {
  MomentId moment;
  HistoryId history;
};

// Finite branching-time model with agents' choices. The moment order is a forest given by
// parent links; histories are its root-to-leaf branches, numbered in depth-first leaf order.
class BtacModel {
 public:
  BtacModel() = default;
  // Throws std::invalid_argument on a parent index out of range.
  explicit BtacModel(std::vector<Moment> moments);

  const std::vector<Moment>& moments() const noexcept { return moments_; }
  std::size_t moment_count() const noexcept { return moments_.size(); }
  bool acyclic() const noexcept { return acyclic_; }
  std::optional<MomentId> find_moment(const std::string& name) const;

  // Each history lists its moments from the root down to its leaf.
  const std::vector<std::vector<MomentId>>& histories() const noexcept { return histories_; }
  std::size_t history_count() const noexcept { return histories_.size(); }
  std::string history_name(HistoryId h) const { return "h" + std::to_string(h + 1); }
  std::optional<HistoryId> find_history(const std::string& name) const;
  // H_w, ascending.
  const std::vector<HistoryId>& histories_through(MomentId w) const { return through_.at(w); }
  bool passes(MomentId w, HistoryId h) const;

  // Cells are stored as given; validate_model checks them.
  void set_choice(Agent i, MomentId w, Cells cells);
  const Cells* explicit_choice(Agent i, MomentId w) const;
  // Explicit cells or the vacuous single cell H_w.
  Cells choice(Agent i, MomentId w) const;
  std::set<Agent> agents_with_choices() const;
  const std::map<std::pair<Agent, MomentId>, Cells>& choices() const noexcept { return choice_; }

  void add_valuation(const std::string& atom, MomentId w, HistoryId h);
  void clear_valuation() { valuation_.clear(); }
  bool holds(const std::string& atom, MomentId w, HistoryId h) const;
  const std::map<std::string, std::set<std::pair<MomentId, HistoryId>>>& valuation() const noexcept {
    return valuation_;
  }

 private:
  std::vector<Moment> moments_;
  bool acyclic_ = true;
  std::vector<std::vector<MomentId>> histories_;
  std::vector<std::vector<HistoryId>> through_;
  std::vector<std::vector<char>> on_;
  std::map<std::pair<Agent, MomentId>, Cells> choice_;
  std::map<std::string, std::set<std::pair<MomentId, HistoryId>>> valuation_;
};

struct Violation {
  std::string condition;
  std::string detail;
};

std::vector<Violation> validate_model(const BtacModel& m);

// Throws ModelError for an index with h not through w.
bool eval(const BtacModel& m, Index idx, const Formula& f);
// Truth values over H_w, in the order of histories_through(w).
std::vector<bool> moment_extension(const BtacModel& m, MomentId w, const Formula& f);
bool valid_in_model(const BtacModel& m, const Formula& f);

struct EnumerationBounds {
  // Branching (non-leaf) moments; every history ends in its own leaf moment.
  std::size_t max_moments = 1;
  std::size_t max_histories = 2;
  std::size_t agent_count = 1;
  std::vector<std::string> atoms;
};

// Rooted trees and superadditive choices for agents 0..agent_count-1, without valuation.
// Throws std::invalid_argument when the bounds exceed the documented guard.
void enumerate_frames(const EnumerationBounds& bounds, const std::function<bool(const BtacModel&)>& visit);
// Frames combined with every valuation of the listed atoms.
void enumerate_models(const EnumerationBounds& bounds, const std::function<bool(const BtacModel&)>& visit);

BtacModel read_model(const std::string& text);
std::string write_model(const BtacModel& m);
// "w/h" with moment and history names.
Index parse_index(const BtacModel& m, const std::string& text);

}  // namespace stitkit::btac
