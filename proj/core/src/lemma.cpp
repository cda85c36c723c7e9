#include "qmult/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qmult {

namespace {

void require_compatible(std::span<const FactorizedOperator> ops) {
  if (ops.empty()) throw std::invalid_argument("operator list is empty");
  for (const auto& op : ops) {
    if (op.dims() != ops.front().dims()) throw std::invalid_argument("operators disagree on factor dimensions");
  }
}

SubsetMask common_identity(std::span<const FactorizedOperator> ops) {
  SubsetMask common = ops.front().identity_positions();
  for (const auto& op : ops) common = common.intersect(op.identity_positions());
  return common;
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

FactorDims random_dims(Rng& rng, const LemmaInstanceShape& shape, std::size_t n) {
  if (shape.dim_choices.empty()) throw std::invalid_argument("no dimension choices");
  FactorDims dims(n);
  for (auto& d : dims) d = shape.dim_choices[pick(rng, 0, shape.dim_choices.size() - 1)];
  return dims;
}

}  // namespace

FactorizedOperator::FactorizedOperator(FactorDims dims, SubsetMask identity_positions, ComplexMatrix part)
    : dims_(std::move(dims)), identity_(identity_positions), part_(std::move(part)) {
  if (dims_.empty()) throw std::invalid_argument("factorized operator needs at least one factor");
  if (identity_.n() != dims_.size()) throw std::invalid_argument("identity positions and dims disagree on factor count");
  const std::size_t support_dim = support().dim(dims_);
  if (part_.rows() != static_cast<Eigen::Index>(support_dim) || part_.cols() != static_cast<Eigen::Index>(support_dim)) {
    throw std::invalid_argument("nontrivial part must act on the complement of the identity positions (dimension " +
                                std::to_string(support_dim) + ")");
  }
}

FactorizedOperator FactorizedOperator::rank_one(FactorDims dims, SubsetMask identity_positions, ComplexVector a,
                                                ComplexVector b) {
  if (std::abs(a.norm() - 1.0) > 1e-12 || std::abs(b.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("rank-one factors must be unit vectors");
  }
  FactorizedOperator op(std::move(dims), identity_positions, a * b.adjoint());
  op.rank_one_ = RankOneParts{std::move(a), std::move(b)};
  return op;
}

ComplexMatrix FactorizedOperator::full() const {
  const SplitIndex split = split_index(dims_, identity_);
  const std::size_t inner = split.inside_dim;
  ComplexMatrix out = ComplexMatrix::Zero(split.full_dim, split.full_dim);
  for (std::size_t o1 = 0; o1 < split.outside_dim; ++o1) {
    for (std::size_t o2 = 0; o2 < split.outside_dim; ++o2) {
      const Complex v = part_(o1, o2);
      if (v == Complex(0.0)) continue;
      for (std::size_t x = 0; x < inner; ++x) out(split.full[o1 * inner + x], split.full[o2 * inner + x]) = v;
    }
  }
  return out;
}

double FactorizedOperator::part_trace_norm() const {
  if (rank_one_) return rank_one_->a.norm() * rank_one_->b.norm();
  return trace_norm_general(part_);
}

Complex trace_of_product(std::span<const FactorizedOperator> ops) {
  require_compatible(ops);
  ComplexMatrix acc = ops.front().full();
  for (std::size_t k = 1; k < ops.size(); ++k) acc = acc * ops[k].full();
  return acc.trace();
}

TraceBoundReport check_trace_bound(std::span<const FactorizedOperator> ops) {
  require_compatible(ops);
  TraceBoundReport r;
  r.lhs = std::abs(trace_of_product(ops));
  r.common_dim = common_identity(ops).dim(ops.front().dims());
  r.rhs = static_cast<double>(r.common_dim);
  for (const auto& op : ops) r.rhs *= op.part_trace_norm();
  r.passed = r.lhs <= r.rhs + kTraceBoundTol;
  return r;
}

std::vector<FactorizedOperator> remove_common_factors(std::span<const FactorizedOperator> ops) {
  require_compatible(ops);
  const SubsetMask common = common_identity(ops);
  const FactorDims& dims = ops.front().dims();
  if (common.size() == dims.size()) throw std::invalid_argument("every factor is common; nothing remains");

  FactorDims kept_dims;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!common.contains(i)) {
      kept.push_back(i);
      kept_dims.push_back(dims[i]);
    }
  }
  std::vector<FactorizedOperator> out;
  for (const auto& op : ops) {
    std::uint32_t bits = 0;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (op.identity_positions().contains(kept[j])) bits |= 1u << j;
    }
    const SubsetMask identity(kept.size(), bits);
    // the support is untouched, so the part carries over as is
    if (const auto& r1 = op.rank_one_parts()) {
      out.push_back(FactorizedOperator::rank_one(kept_dims, identity, r1->a, r1->b));
    } else {
      out.emplace_back(kept_dims, identity, op.part());
    }
  }
  return out;
}

std::size_t PairPermutation::index_of(const PairIndex& p) const {
  const auto it = std::lower_bound(pairs.begin(), pairs.end(), p);
  if (it == pairs.end() || *it != p) throw std::out_of_range("pair is not in the index set");
  return static_cast<std::size_t>(it - pairs.begin());
}

PairIndex PairPermutation::map(const PairIndex& p) const { return pairs[image[index_of(p)]]; }

bool PairPermutation::is_bijection() const {
  if (image.size() != pairs.size()) return false;
  std::vector<bool> hit(pairs.size(), false);
  for (std::size_t i : image) {
    if (i >= pairs.size() || hit[i]) return false;
    hit[i] = true;
  }
  return true;
}

bool PairPermutation::preserves_factor() const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[image[i]].s != pairs[i].s) return false;
  }
  return true;
}

PairPermutation build_pair_permutation(std::span<const SubsetMask> identity_positions) {
  if (identity_positions.empty()) throw std::invalid_argument("need at least one subset");
  const std::size_t n = identity_positions.front().n();
  PairPermutation perm;
  perm.m = identity_positions.size();
  for (std::size_t k = 0; k < perm.m; ++k) {
    if (identity_positions[k].n() != n) throw std::invalid_argument("subsets over different factor counts");
    for (std::size_t s = 0; s < n; ++s) {
      if (!identity_positions[k].contains(s)) perm.pairs.push_back({k, s});
    }
  }
  perm.image.resize(perm.pairs.size());
  for (std::size_t i = 0; i < perm.pairs.size(); ++i) {
    const auto [k, s] = perm.pairs[i];
    for (std::size_t l = 1; l <= perm.m; ++l) {
      const std::size_t next = (k + l) % perm.m;
      if (!identity_positions[next].contains(s)) {
        perm.image[i] = perm.index_of({next, s});
        break;
      }
    }
  }
  return perm;
}

CsIdentityReport verify_cs_identity(std::span<const FactorizedOperator> ops, std::size_t multiindex_cap) {
  require_compatible(ops);
  for (const auto& op : ops) {
    if (!op.rank_one_parts()) throw std::invalid_argument("verify_cs_identity needs rank-one parts");
  }
  if (!common_identity(ops).is_empty()) {
    throw std::invalid_argument("verify_cs_identity needs the identity positions to have empty intersection");
  }

  const FactorDims& dims = ops.front().dims();
  const std::size_t m = ops.size();
  std::vector<SubsetMask> subsets;
  for (const auto& op : ops) subsets.push_back(op.identity_positions());

  CsIdentityReport r;
  const PairPermutation perm = build_pair_permutation(subsets);
  r.bijective = perm.is_bijection() && perm.preserves_factor();
  const std::size_t npairs = perm.pairs.size();

  std::size_t count = 1;
  for (const auto& p : perm.pairs) {
    if (count > multiindex_cap / dims[p.s]) {
      throw std::invalid_argument("multiindex space exceeds the cap of " + std::to_string(multiindex_cap) +
                                  "; required cap >= " + std::to_string([&] {
                                    double c = 1.0;
                                    for (const auto& q : perm.pairs) c *= static_cast<double>(dims[q.s]);
                                    return static_cast<std::size_t>(c);
                                  }()));
    }
    count *= dims[p.s];
  }
  r.multiindex_count = count;

  // Stride of pair i inside the row-major index of its operator's support.
  std::vector<std::size_t> stride(npairs, 1);
  for (std::size_t i = npairs; i-- > 0;) {
    if (i + 1 < npairs && perm.pairs[i + 1].k == perm.pairs[i].k) {
      stride[i] = stride[i + 1] * dims[perm.pairs[i + 1].s];
    }
  }

  std::vector<std::size_t> j(npairs, 0);
  std::vector<std::size_t> beta_idx(m), alpha_idx(m);
  Complex sum = 0.0;
  double alpha_sq = 0.0, beta_sq = 0.0;
  for (std::size_t step = 0; step < count; ++step) {
    std::fill(beta_idx.begin(), beta_idx.end(), 0);
    std::fill(alpha_idx.begin(), alpha_idx.end(), 0);
    for (std::size_t i = 0; i < npairs; ++i) {
      beta_idx[perm.pairs[i].k] += j[i] * stride[i];
      // the permuted multiindex carries component j(k, s) at position P(k, s)
      const std::size_t t = perm.image[i];
      alpha_idx[perm.pairs[t].k] += j[i] * stride[t];
    }
    Complex beta = 1.0, alpha_perm = 1.0, alpha = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& parts = *ops[k].rank_one_parts();
      beta *= parts.b(static_cast<Eigen::Index>(beta_idx[k]));
      alpha_perm *= parts.a(static_cast<Eigen::Index>(alpha_idx[k]));
      alpha *= parts.a(static_cast<Eigen::Index>(beta_idx[k]));
    }
    sum += std::conj(beta) * alpha_perm;
    alpha_sq += std::norm(alpha);
    beta_sq += std::norm(beta);

    for (std::size_t i = npairs; i-- > 0;) {
      if (++j[i] < dims[perm.pairs[i].s]) break;
      j[i] = 0;
    }
  }

  r.direct = trace_of_product(ops);
  r.permuted_sum = sum;
  r.deviation = std::abs(r.direct - r.permuted_sum);
  r.alpha_norm_sq = alpha_sq;
  r.beta_norm_sq = beta_sq;
  r.passed = r.bijective && r.deviation <= kCsIdentityTol && std::abs(alpha_sq - 1.0) <= kCoefficientNormTol &&
             std::abs(beta_sq - 1.0) <= kCoefficientNormTol && std::abs(sum) <= 1.0 + kCsIdentityTol;
  return r;
}

std::vector<FactorizedOperator> random_trace_bound_instance(Rng& rng, const LemmaInstanceShape& shape) {
  const std::size_t n = pick(rng, 1, shape.max_n);
  const std::size_t m = pick(rng, 1, shape.max_m);
  const FactorDims dims = random_dims(rng, shape, n);
  std::bernoulli_distribution rank_one(shape.rank_one_fraction);
  std::vector<FactorizedOperator> ops;
  for (std::size_t k = 0; k < m; ++k) {
    const SubsetMask identity(n, static_cast<std::uint32_t>(pick(rng, 1, (std::size_t{1} << n) - 1)));
    const std::size_t sd = identity.complement().dim(dims);
    if (rank_one(rng)) {
      ComplexVector a = haar_vector(sd, rng);
      ComplexVector b = haar_vector(sd, rng);
      ops.push_back(FactorizedOperator::rank_one(dims, identity, std::move(a), std::move(b)));
    } else {
      ops.emplace_back(dims, identity, ginibre(sd, sd, rng));
    }
  }
  return ops;
}

std::vector<FactorizedOperator> random_cs_instance(Rng& rng, const LemmaInstanceShape& shape) {
  const std::size_t n = pick(rng, 1, shape.max_n);
  const std::size_t m = pick(rng, 1, shape.max_m);
  const FactorDims dims = random_dims(rng, shape, n);
  std::vector<SubsetMask> subsets;
  for (;;) {
    subsets.clear();
    std::uint32_t common = (1u << n) - 1u;
    for (std::size_t k = 0; k < m; ++k) {
      const auto bits = static_cast<std::uint32_t>(pick(rng, 0, (std::size_t{1} << n) - 1));
      subsets.emplace_back(n, bits);
      common &= bits;
    }
    if (common == 0) break;
  }
  std::vector<FactorizedOperator> ops;
  for (const auto& identity : subsets) {
    const std::size_t sd = identity.complement().dim(dims);
    ComplexVector a = haar_vector(sd, rng);
    ComplexVector b = haar_vector(sd, rng);
    ops.push_back(FactorizedOperator::rank_one(dims, identity, std::move(a), std::move(b)));
  }
  return ops;
}

}  // namespace qmult
