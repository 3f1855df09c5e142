#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "stitkit/error.hpp"
#include "stitkit/syntax.hpp"

namespace stitkit::translate {

enum class Direction { ToCstit, ToDstit };

std::string to_string(Direction d);

class TranslateError : public Error {
 public:
  using Error::Error;
};

// Surrogate atoms for every subformula of a source formula, in post-order.
class TranslationTable {
 public:
  static TranslationTable build(const Formula& source, Direction direction);

  Direction direction() const noexcept { return direction_; }
  const std::string& prefix() const noexcept { return prefix_; }
  const std::vector<std::pair<Formula, std::string>>& entries() const noexcept { return entries_; }
  bool contains(const Formula& f) const { return index_.count(f) != 0; }
  // Throws TranslateError when f is not a subformula of the source.
  const std::string& atom_for(const Formula& f) const;

 private:
  Direction direction_ = Direction::ToCstit;
  std::string prefix_;
  std::vector<std::pair<Formula, std::string>> entries_;
  std::map<Formula, std::size_t> index_;
};

// A formula with its length when <-> and | count as primitive binary connectives.
struct Sugared {
  Formula formula;
  std::size_t length = 0;
};

Sugared biimp(const Formula& psi, const TranslationTable& table);

struct Translation {
  Formula formula;
  TranslationTable table;
  // Length with <-> and | counted like &; the 1 + 14 * length bound is stated for this measure.
  std::size_t surface_length = 0;
  // Length of the fully desugared formula.
  std::size_t primitive_length = 0;
};

constexpr std::size_t kLengthFactor = 14;

// DSTIT input to CSTIT output.
Translation tr(const Formula& f);
// CSTIT input to DSTIT output.
Translation tr_prime(const Formula& f);
Translation translate(const Formula& f, Direction direction);

}  // namespace stitkit::translate
