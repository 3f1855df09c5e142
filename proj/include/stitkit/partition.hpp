#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stitkit {

// Partition of {0..n-1}. Blocks are numbered in order of their smallest element.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<std::uint32_t> block_of);

  static Partition discrete(std::size_t n);
  static Partition trivial(std::size_t n);
  // Throws std::invalid_argument unless cells are nonempty, disjoint and cover 0..n-1.
  static Partition from_cells(std::size_t n, const std::vector<std::vector<std::size_t>>& cells);

  std::size_t size() const noexcept { return block_of_.size(); }
  std::size_t block_count() const noexcept { return blocks_; }
  std::uint32_t block(std::size_t x) const { return block_of_.at(x); }
  bool same(std::size_t x, std::size_t y) const { return block(x) == block(y); }
  std::vector<std::vector<std::size_t>> cells() const;
  const std::vector<std::uint32_t>& blocks() const noexcept { return block_of_; }

  // Partition induced on the retained elements, renumbered in their given order.
  Partition restrict(const std::vector<std::size_t>& keep) const;
  // Every block of *this lies inside a block of other.
  bool refines(const Partition& other) const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

 private:
  std::vector<std::uint32_t> block_of_;
  std::size_t blocks_ = 0;
};

// Calls visit for every partition of {0..n-1} (restricted growth strings, in lexicographic order).
// Stops early when visit returns false; returns false in that case.
bool for_each_partition(std::size_t n, const std::function<bool(const Partition&)>& visit);

std::size_t bell_number(std::size_t n);

}  // namespace stitkit
