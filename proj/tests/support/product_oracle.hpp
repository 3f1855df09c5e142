#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "stitkit/syntax.hpp"

namespace testsupport {

// Satisfiability over full product models C0 x C1 (one world per cell pair), written
// without the library's model checker so it can serve as an independent reference.
class ProductOracle {
 public:
  explicit ProductOracle(std::size_t max_side = 3) : max_side_(max_side) {}

  bool satisfiable(const stitkit::Formula& f) const {
    std::vector<std::string> names;
    for (const auto& a : stitkit::atoms(f)) names.push_back(a);
    for (std::size_t r = 1; r <= max_side_; ++r)
      for (std::size_t c = 1; c <= max_side_; ++c)
        if (satisfiable_on(f, names, r, c)) return true;
    return false;
  }

 private:
  std::size_t max_side_;

  struct Grid {
    std::size_t rows, cols;
    std::uint32_t all() const { return (std::uint32_t{1} << (rows * cols)) - 1; }
    std::uint32_t row_mask(std::size_t r) const {
      std::uint32_t m = 0;
      for (std::size_t c = 0; c < cols; ++c) m |= std::uint32_t{1} << (r * cols + c);
      return m;
    }
    std::uint32_t col_mask(std::size_t c) const {
      std::uint32_t m = 0;
      for (std::size_t r = 0; r < rows; ++r) m |= std::uint32_t{1} << (r * cols + c);
      return m;
    }
  };

  // Agent 0 chooses the row, agent 1 the column.
  static std::uint32_t settled(const Grid& g, stitkit::Agent i, std::uint32_t m) {
    std::uint32_t out = 0;
    const std::size_t count = i == 0 ? g.rows : g.cols;
    for (std::size_t k = 0; k < count; ++k) {
      std::uint32_t cell = i == 0 ? g.row_mask(k) : g.col_mask(k);
      if ((m & cell) == cell) out |= cell;
    }
    return out;
  }

  static std::uint32_t eval(const Grid& g, const stitkit::Formula& f, const std::map<std::string, std::uint32_t>& v) {
    using stitkit::Op;
    switch (f.op()) {
      case Op::Atom: return v.at(f.name());
      case Op::Not: return g.all() & ~eval(g, f.body(), v);
      case Op::And: return eval(g, f.lhs(), v) & eval(g, f.rhs(), v);
      case Op::Box: return eval(g, f.body(), v) == g.all() ? g.all() : 0;
      case Op::Cstit: return settled(g, f.agent(), eval(g, f.body(), v));
      case Op::Dstit: {
        std::uint32_t body = eval(g, f.body(), v);
        return body == g.all() ? 0 : settled(g, f.agent(), body);
      }
    }
    return 0;
  }

  static bool satisfiable_on(const stitkit::Formula& f, const std::vector<std::string>& names, std::size_t r,
                             std::size_t c) {
    Grid g{r, c};
    const std::size_t n = r * c;
    const std::uint64_t per_atom = std::uint64_t{1} << n;
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < names.size(); ++k) total *= per_atom;
    std::map<std::string, std::uint32_t> v;
    for (std::uint64_t code = 0; code < total; ++code) {
      std::uint64_t rest = code;
      for (const auto& a : names) {
        v[a] = static_cast<std::uint32_t>(rest % per_atom);
        rest /= per_atom;
      }
      if (eval(g, f, v) != 0) return true;
    }
    return false;
  }
};

}  // namespace testsupport
