#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stitkit/error.hpp"

namespace stitkit {

using Agent = std::uint32_t;

enum class Op : std::uint8_t { Atom, Not, And, Cstit, Dstit, Box };

// Immutable formula tree with shared subterms. Copies are cheap.
class Formula {
 public:
  static Formula atom(std::string name);
  static Formula negation(Formula body);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula cstit(Agent agent, Formula body);
  static Formula dstit(Agent agent, Formula body);
  static Formula box(Formula body);

  Op op() const noexcept;
  const std::string& name() const;
  Agent agent() const;
  // Single child of Not, Cstit, Dstit and Box.
  Formula body() const;
  Formula lhs() const;
  Formula rhs() const;

  std::size_t hash() const noexcept;
  // Saturating at SIZE_MAX.
  std::size_t length() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Formula atom(std::string name);
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula cstit(Agent i, Formula f);
Formula dstit(Agent i, Formula f);
Formula box(Formula f);

// Sugar. These build the primitive encodings the parser uses.
Formula disj(Formula a, Formula b);     // ~(~a & ~b)
Formula implies(Formula a, Formula b);  // ~(a & ~b)
Formula iff(Formula a, Formula b);      // ((a -> b) & (b -> a))
Formula diamond(Formula f);             // ~[]~f
Formula poss(Agent i, Formula f);       // ~[i]~f
// Left-nested conjunction; an empty list gives the constant ~(p & ~p) over `filler`.
Formula conj_all(const std::vector<Formula>& parts, const std::string& filler = "p");
Formula top(const std::string& filler = "p");

enum class LanguageTag { Cstit, Dstit, Mixed };

enum class PrintStyle { Canonical, Sugared };

Formula parse(std::string_view text);
std::string print(const Formula& f, PrintStyle style = PrintStyle::Canonical);

std::size_t length(const Formula& f);
// Post-order, children before parents, left before right, no duplicates.
std::vector<Formula> subformulas(const Formula& f);
std::set<Agent> agents(const Formula& f);
std::set<std::string> atoms(const Formula& f);
bool contains_op(const Formula& f, Op op);
bool in_language(const Formula& f, LanguageTag tag);
std::string to_string(LanguageTag tag);

// {i}f becomes ([i]f & ~[]f), recursively.
Formula expand_dstit(const Formula& f);
Formula substitute(const Formula& f, const std::map<std::string, Formula>& bindings);
// Removes every ~~ pair anywhere in the tree.
Formula strip_double_negations(const Formula& f);
std::size_t modal_depth(const Formula& f);

bool is_identifier(std::string_view s);

}  // namespace stitkit

template <>
struct std::hash<stitkit::Formula> {
  std::size_t operator()(const stitkit::Formula& f) const noexcept { return f.hash(); }
};
