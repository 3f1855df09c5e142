#include "stitkit/partition.hpp"

#include <stdexcept>

namespace stitkit {

Partition::Partition(std::vector<std::uint32_t> block_of) {
  std::vector<std::uint32_t> rename;
  const std::uint32_t unset = UINT32_MAX;
  for (auto& b : block_of) {
    if (b >= rename.size()) rename.resize(b + 1, unset);
    if (rename[b] == unset) rename[b] = static_cast<std::uint32_t>(blocks_++);
    b = rename[b];
  }
  block_of_ = std::move(block_of);
}

Partition Partition::discrete(std::size_t n) {
  std::vector<std::uint32_t> b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = static_cast<std::uint32_t>(k);
  return Partition(std::move(b));
}

Partition Partition::trivial(std::size_t n) { return Partition(std::vector<std::uint32_t>(n, 0)); }

Partition Partition::from_cells(std::size_t n, const std::vector<std::vector<std::size_t>>& cells) {
  const std::uint32_t unset = UINT32_MAX;
  std::vector<std::uint32_t> b(n, unset);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].empty()) throw std::invalid_argument("empty cell");
    for (auto x : cells[c]) {
      if (x >= n) throw std::invalid_argument("cell element out of range");
      if (b[x] != unset) throw std::invalid_argument("cells overlap");
      b[x] = static_cast<std::uint32_t>(c);
    }
  }
  for (auto v : b)
    if (v == unset) throw std::invalid_argument("cells do not cover every element");
  return Partition(std::move(b));
}

std::vector<std::vector<std::size_t>> Partition::cells() const {
  std::vector<std::vector<std::size_t>> out(blocks_);
  for (std::size_t x = 0; x < block_of_.size(); ++x) out[block_of_[x]].push_back(x);
  return out;
}

Partition Partition::restrict(const std::vector<std::size_t>& keep) const {
  std::vector<std::uint32_t> b;
  b.reserve(keep.size());
  for (auto x : keep) b.push_back(block(x));
  return Partition(std::move(b));
}

bool Partition::refines(const Partition& other) const {
  if (other.size() != size()) return false;
  std::vector<std::uint32_t> image(blocks_, UINT32_MAX);
  for (std::size_t x = 0; x < size(); ++x) {
    auto& slot = image[block_of_[x]];
    if (slot == UINT32_MAX) slot = other.block(x);
    else if (slot != other.block(x)) return false;
  }
  return true;
}

bool for_each_partition(std::size_t n, const std::function<bool(const Partition&)>& visit) {
  if (n == 0) return visit(Partition());
  std::vector<std::uint32_t> a(n, 0), max_prefix(n, 0);
  while (true) {
    if (!visit(Partition(a))) return false;
    // Next restricted growth string.
    std::size_t k = n - 1;
    while (k > 0 && a[k] > max_prefix[k - 1]) --k;
    if (k == 0) return true;
    ++a[k];
    max_prefix[k] = std::max(max_prefix[k - 1], a[k]);
    for (std::size_t j = k + 1; j < n; ++j) {
      a[j] = 0;
      max_prefix[j] = max_prefix[k];
    }
  }
}

std::size_t bell_number(std::size_t n) {
  std::vector<std::size_t> row{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::size_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace stitkit
