#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qmult {

// Dimensions d_1..d_n of the tensor factors. Factor 0 is the leftmost
// (slowest-varying) index of the composite space.
using FactorDims = std::vector<std::size_t>;

std::size_t total_dim(std::span<const std::size_t> dims);

// Throws unless every dimension is >= 1 and the product equals `expected`.
void check_dims(std::span<const std::size_t> dims, std::size_t expected);

// A subset L of {0, ..., n-1}. Bit i is the indicator theta_L(i).
class SubsetMask {
public:
  static constexpr std::size_t kMaxFactors = 32;

  SubsetMask() = default;
  SubsetMask(std::size_t n, std::uint32_t bits);

  static SubsetMask empty(std::size_t n) { return SubsetMask(n, 0); }
  static SubsetMask full(std::size_t n);
  static SubsetMask of(std::size_t n, std::initializer_list<std::size_t> members);

  std::size_t n() const { return n_; }
  std::uint32_t bits() const { return bits_; }
  bool contains(std::size_t i) const { return i < n_ && ((bits_ >> i) & 1u) != 0; }
  std::size_t size() const;
  bool is_empty() const { return bits_ == 0; }

  std::vector<std::size_t> members() const;

  SubsetMask complement() const;
  SubsetMask intersect(const SubsetMask& other) const;
  SubsetMask unite(const SubsetMask& other) const;

  // d_L = product of dims over members; d_empty = 1.
  std::size_t dim(std::span<const std::size_t> dims) const;

  // "{1,3}" style, 0-based members.
  std::string to_string() const;

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

private:
  void require_same_n(const SubsetMask& other) const;

  std::size_t n_ = 0;
  std::uint32_t bits_ = 0;
};

// Index bookkeeping for a row-major composite index split into a subset L and
// its complement. For every full index i, `inside[i]` is the row-major index
// of the digits belonging to L and `outside[i]` that of the remaining digits.
struct SplitIndex {
  std::size_t full_dim = 0;
  std::size_t inside_dim = 0;
  std::size_t outside_dim = 0;
  std::vector<std::size_t> inside;
  std::vector<std::size_t> outside;
  // full index assembled from (outside, inside) pairs: full[o * inside_dim + in].
  std::vector<std::size_t> full;
};

SplitIndex split_index(std::span<const std::size_t> dims, const SubsetMask& subset);

}  // namespace qmult
