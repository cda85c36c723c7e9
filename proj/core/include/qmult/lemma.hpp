#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qmult/linalg.hpp"
#include "qmult/random.hpp"
#include "qmult/subset.hpp"

namespace qmult {

// Unit vectors a, b on the support space with part = |a><b|.
struct RankOneParts {
  ComplexVector a;
  ComplexVector b;
};

// A = B (x) I_L on the composite space, where B acts on the factors outside L
// (the support), kept in their original order.
class FactorizedOperator {
public:
  FactorizedOperator(FactorDims dims, SubsetMask identity_positions, ComplexMatrix part);
  // part = |a><b|; a and b must be unit vectors of length d_{L^c}.
  static FactorizedOperator rank_one(FactorDims dims, SubsetMask identity_positions, ComplexVector a, ComplexVector b);

  std::size_t n() const { return dims_.size(); }
  const FactorDims& dims() const { return dims_; }
  const SubsetMask& identity_positions() const { return identity_; }
  SubsetMask support() const { return identity_.complement(); }
  const ComplexMatrix& part() const { return part_; }
  const std::optional<RankOneParts>& rank_one_parts() const { return rank_one_; }

  ComplexMatrix full() const;
  // ||B||_1: ||a|| ||b|| for rank-one parts, Hermitian dilation otherwise.
  double part_trace_norm() const;

private:
  FactorDims dims_;
  SubsetMask identity_;
  ComplexMatrix part_;
  std::optional<RankOneParts> rank_one_;
};

// Tr(A_1 ... A_m) by explicit multiplication on the full space.
Complex trace_of_product(std::span<const FactorizedOperator> ops);

struct TraceBoundReport {
  double lhs = 0.0;              // |Tr A_1 ... A_m|
  double rhs = 0.0;              // d_{cap L} prod ||B_k||_1
  std::size_t common_dim = 1;    // d_{cap L}
  bool passed = false;
};

inline constexpr double kTraceBoundTol = 1e-10;

TraceBoundReport check_trace_bound(std::span<const FactorizedOperator> ops);

// Drops the factors common to every L_k. Each trace shrinks by d_{cap L}.
std::vector<FactorizedOperator> remove_common_factors(std::span<const FactorizedOperator> ops);

struct PairIndex {
  std::size_t k = 0;   // operator position, 0-based
  std::size_t s = 0;   // factor, 0-based
  friend bool operator==(const PairIndex&, const PairIndex&) = default;
  friend auto operator<=>(const PairIndex&, const PairIndex&) = default;
};

// The map (k, s) -> (k + l mod m, s) on the pairs with s outside L_k, l the
// smallest positive step landing on another such pair (l = m returns to k).
struct PairPermutation {
  std::size_t m = 0;
  std::vector<PairIndex> pairs;      // sorted by (k, s)
  std::vector<std::size_t> image;    // image[i] indexes into pairs

  std::size_t index_of(const PairIndex& p) const;
  PairIndex map(const PairIndex& p) const;
  bool is_bijection() const;
  bool preserves_factor() const;
};

// `identity_positions` holds L_1..L_m; pairs are built over their complements.
PairPermutation build_pair_permutation(std::span<const SubsetMask> identity_positions);

struct CsIdentityReport {
  Complex direct = 0.0;          // trace_of_product
  Complex permuted_sum = 0.0;    // sum_J conj(beta_J) alpha_{PJ}
  double deviation = 0.0;
  double alpha_norm_sq = 0.0;
  double beta_norm_sq = 0.0;
  std::size_t multiindex_count = 0;
  bool bijective = false;
  bool passed = false;
};

inline constexpr std::size_t kDefaultMultiindexCap = 1'000'000;
inline constexpr double kCsIdentityTol = 1e-10;
inline constexpr double kCoefficientNormTol = 1e-12;

// Expands every rank-one part in the computational basis and evaluates the
// permuted coefficient sum against the direct trace. Requires rank-one parts,
// shared dims and an empty common identity set.
CsIdentityReport verify_cs_identity(std::span<const FactorizedOperator> ops,
                                    std::size_t multiindex_cap = kDefaultMultiindexCap);

struct LemmaInstanceShape {
  std::size_t max_m = 4;
  std::size_t max_n = 4;
  std::vector<std::size_t> dim_choices{2, 3};
  // Probability of a rank-one part; the rest are Ginibre matrices.
  double rank_one_fraction = 0.5;
};

// Nonempty L_k drawn uniformly, mixed rank-one and general parts.
std::vector<FactorizedOperator> random_trace_bound_instance(Rng& rng, const LemmaInstanceShape& shape);
// Rank-one parts with Haar vectors, L_k uniform over all subsets conditioned on
// an empty intersection.
std::vector<FactorizedOperator> random_cs_instance(Rng& rng, const LemmaInstanceShape& shape);

}  // namespace qmult
