#include "qmult/subset.hpp"

#include <bit>
#include <stdexcept>

namespace qmult {

std::size_t total_dim(std::span<const std::size_t> dims) {
  std::size_t d = 1;
  for (std::size_t di : dims) d *= di;
  return d;
}

void check_dims(std::span<const std::size_t> dims, std::size_t expected) {
  if (dims.empty()) throw std::invalid_argument("factor dimension list is empty");
  for (std::size_t di : dims) {
    if (di == 0) throw std::invalid_argument("factor dimension must be positive");
  }
  if (total_dim(dims) != expected) {
    throw std::invalid_argument("product of factor dimensions (" + std::to_string(total_dim(dims)) +
                                ") does not match matrix dimension (" + std::to_string(expected) + ")");
  }
}

SubsetMask::SubsetMask(std::size_t n, std::uint32_t bits) : n_(n), bits_(bits) {
  if (n > kMaxFactors) throw std::invalid_argument("too many tensor factors");
  if (n < kMaxFactors && (bits >> n) != 0) {
    throw std::invalid_argument("subset mask has members outside {0..n-1}");
  }
}

SubsetMask SubsetMask::full(std::size_t n) {
  return SubsetMask(n, n == kMaxFactors ? ~0u : ((1u << n) - 1u));
}

SubsetMask SubsetMask::of(std::size_t n, std::initializer_list<std::size_t> members) {
  std::uint32_t bits = 0;
  for (std::size_t i : members) {
    if (i >= n) throw std::invalid_argument("subset member out of range");
    bits |= 1u << i;
  }
  return SubsetMask(n, bits);
}

std::size_t SubsetMask::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::size_t> SubsetMask::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

SubsetMask SubsetMask::complement() const { return SubsetMask(n_, full(n_).bits_ & ~bits_); }

void SubsetMask::require_same_n(const SubsetMask& other) const {
  if (other.n_ != n_) throw std::invalid_argument("subset masks over different factor counts");
}

SubsetMask SubsetMask::intersect(const SubsetMask& other) const {
  require_same_n(other);
  return SubsetMask(n_, bits_ & other.bits_);
}

SubsetMask SubsetMask::unite(const SubsetMask& other) const {
  require_same_n(other);
  return SubsetMask(n_, bits_ | other.bits_);
}

std::size_t SubsetMask::dim(std::span<const std::size_t> dims) const {
  if (dims.size() != n_) throw std::invalid_argument("subset mask and dims disagree on factor count");
  std::size_t d = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    if (contains(i)) d *= dims[i];
  }
  return d;
}

std::string SubsetMask::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : members()) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

SplitIndex split_index(std::span<const std::size_t> dims, const SubsetMask& subset) {
  if (dims.size() != subset.n()) throw std::invalid_argument("subset mask and dims disagree on factor count");
  SplitIndex s;
  s.full_dim = total_dim(dims);
  s.inside_dim = subset.dim(dims);
  s.outside_dim = s.full_dim / s.inside_dim;
  s.inside.resize(s.full_dim);
  s.outside.resize(s.full_dim);
  s.full.resize(s.full_dim);

  std::vector<std::size_t> digits(dims.size(), 0);
  for (std::size_t idx = 0; idx < s.full_dim; ++idx) {
    std::size_t in = 0;
    std::size_t out = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (subset.contains(f)) {
        in = in * dims[f] + digits[f];
      } else {
        out = out * dims[f] + digits[f];
      }
    }
    s.inside[idx] = in;
    s.outside[idx] = out;
    s.full[out * s.inside_dim + in] = idx;

    // odometer, last factor fastest
    for (std::size_t f = dims.size(); f-- > 0;) {
      if (++digits[f] < dims[f]) break;
      digits[f] = 0;
    }
  }
  return s;
}

}  // namespace qmult
