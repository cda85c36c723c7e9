#include "qmult/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmult {

namespace {

void collect_leaves(const QuantumChannel& c, std::vector<const QuantumChannel*>& out) {
  if (const auto* p = std::get_if<ProductForm>(&c.form())) {
    for (const auto& f : p->factors) collect_leaves(f, out);
  } else {
    out.push_back(&c);
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[32];
    std::snprintf(tmp, sizeof(tmp), "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

ComplexMatrix depolarize_block(const ComplexMatrix& b, double q) {
  const Eigen::Index d = b.rows();
  ComplexMatrix out = (1.0 - q) * b;
  const Complex shift = q * b.trace() / static_cast<double>(d);
  for (Eigen::Index i = 0; i < d; ++i) out(i, i) += shift;
  return out;
}

ComplexMatrix kraus_block(const std::vector<ComplexMatrix>& ops, const ComplexMatrix& b, bool adjoint) {
  ComplexMatrix out = ComplexMatrix::Zero(b.rows(), b.cols());
  for (const auto& a : ops) {
    if (adjoint) {
      out.noalias() += a.adjoint() * b * a;
    } else {
      out.noalias() += a * b * a.adjoint();
    }
  }
  return out;
}

ComplexMatrix leaf_block(const QuantumChannel& leaf, const ComplexMatrix& b, bool adjoint) {
  if (const auto* dep = std::get_if<DepolarizingForm>(&leaf.form())) return depolarize_block(b, dep->q);
  return kraus_block(std::get<KrausForm>(leaf.form()).ops, b, adjoint);
}

ComplexMatrix apply_impl(const QuantumChannel& channel, const ComplexMatrix& s, bool adjoint) {
  const std::size_t d = square_dim(s);
  if (d != channel.dim()) {
    throw std::invalid_argument("channel of dimension " + std::to_string(channel.dim()) +
                                " applied to a matrix of dimension " + std::to_string(d));
  }
  const auto leaves = channel.leaves();
  if (leaves.size() == 1) return leaf_block(*leaves.front(), s, adjoint);

  const FactorDims dims = channel.dims();
  ComplexMatrix out = s;
  for (std::size_t slot = 0; slot < leaves.size(); ++slot) {
    const QuantumChannel& leaf = *leaves[slot];
    out = apply_on_factor(out, dims, slot, [&](const ComplexMatrix& b) { return leaf_block(leaf, b, adjoint); });
  }
  return out;
}

double operator_norm_hermitian(const ComplexMatrix& m) {
  return hermitian_eigen_unchecked(m).values.cwiseAbs().maxCoeff();
}

}  // namespace

QuantumChannel QuantumChannel::kraus(std::vector<ComplexMatrix> ops) {
  if (ops.empty()) throw std::invalid_argument("Kraus list is empty");
  const std::size_t d = square_dim(ops.front());
  for (const auto& a : ops) {
    if (square_dim(a) != d) throw std::invalid_argument("Kraus operators have mismatched dimensions");
  }
  return QuantumChannel(KrausForm{std::move(ops)}, d);
}

QuantumChannel QuantumChannel::depolarizing(std::size_t d, double q) {
  if (d == 0) throw std::invalid_argument("depolarizing channel needs d >= 1");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("depolarizing parameter q must lie in [0, 1]");
  return QuantumChannel(DepolarizingForm{d, q}, d);
}

QuantumChannel QuantumChannel::product(std::vector<QuantumChannel> factors) {
  if (factors.empty()) throw std::invalid_argument("product channel needs at least one factor");
  std::size_t d = 1;
  for (const auto& f : factors) d *= f.dim();
  return QuantumChannel(ProductForm{std::move(factors)}, d);
}

QuantumChannel QuantumChannel::identity(std::size_t d) { return kraus({qmult::identity(d)}); }

FactorDims QuantumChannel::dims() const {
  FactorDims out;
  for (const auto* leaf : leaves()) out.push_back(leaf->dim());
  return out;
}

std::vector<const QuantumChannel*> QuantumChannel::leaves() const {
  std::vector<const QuantumChannel*> out;
  collect_leaves(*this, out);
  return out;
}

bool QuantumChannel::is_depolarizing_product() const {
  for (const auto* leaf : leaves()) {
    if (!leaf->is_depolarizing()) return false;
  }
  return true;
}

bool QuantumChannel::has_boundary_parameter() const {
  for (const auto* leaf : leaves()) {
    if (const auto* dep = std::get_if<DepolarizingForm>(&leaf->form())) {
      if (dep->q == 0.0 || dep->q == 1.0) return true;
    }
  }
  return false;
}

std::string QuantumChannel::describe() const {
  if (const auto* dep = std::get_if<DepolarizingForm>(&form_)) {
    return "depolarizing(d=" + std::to_string(dep->d) + ",q=" + format_double(dep->q) + ")";
  }
  if (const auto* k = std::get_if<KrausForm>(&form_)) {
    return "kraus(d=" + std::to_string(dim_) + ",k=" + std::to_string(k->ops.size()) + ")";
  }
  std::string out;
  const auto& factors = std::get<ProductForm>(form_).factors;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += " x ";
    const bool nested = factors[i].is_product();
    out += nested ? "(" + factors[i].describe() + ")" : factors[i].describe();
  }
  return out;
}

ComplexMatrix apply_on_factor(const ComplexMatrix& s, std::span<const std::size_t> dims, std::size_t slot,
                              const std::function<ComplexMatrix(const ComplexMatrix&)>& block_map) {
  const std::size_t d = square_dim(s);
  check_dims(dims, d);
  if (slot >= dims.size()) throw std::invalid_argument("factor slot out of range");
  const std::size_t local = dims[slot];
  const std::size_t outer = d / local;
  const SplitIndex split = split_index(dims, SubsetMask::of(dims.size(), {slot}));

  ComplexMatrix out(d, d);
  ComplexMatrix block(local, local);
  for (std::size_t o1 = 0; o1 < outer; ++o1) {
    for (std::size_t o2 = 0; o2 < outer; ++o2) {
      for (std::size_t x1 = 0; x1 < local; ++x1) {
        for (std::size_t x2 = 0; x2 < local; ++x2) {
          block(x1, x2) = s(split.full[o1 * local + x1], split.full[o2 * local + x2]);
        }
      }
      const ComplexMatrix mapped = block_map(block);
      for (std::size_t x1 = 0; x1 < local; ++x1) {
        for (std::size_t x2 = 0; x2 < local; ++x2) {
          out(split.full[o1 * local + x1], split.full[o2 * local + x2]) = mapped(x1, x2);
        }
      }
    }
  }
  return out;
}

ComplexMatrix ApplyChannelFn::operator()(const QuantumChannel& channel, const ComplexMatrix& s) const {
  return apply_impl(channel, s, false);
}

ComplexMatrix apply_adjoint(const QuantumChannel& channel, const ComplexMatrix& s) {
  return apply_impl(channel, s, true);
}

ComplexMatrix weyl_operator(std::size_t d, std::size_t j, std::size_t k) {
  ComplexMatrix w = ComplexMatrix::Zero(d, d);
  const double angle = 2.0 * std::numbers::pi / static_cast<double>(d);
  // (X^j Z^k)|i> = w^(k i) |i + j>
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t phase = (k * i) % d;
    w((i + j) % d, i) = std::polar(1.0, angle * static_cast<double>(phase));
  }
  return w;
}

std::vector<ComplexMatrix> kraus_of_depolarizing(std::size_t d, double q) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("depolarizing parameter q must lie in [0, 1]");
  const double dd = static_cast<double>(d * d);
  const double w0 = 1.0 - q * (dd - 1.0) / dd;
  const double w = q / dd;
  std::vector<ComplexMatrix> ops;
  if (w0 > 0.0) ops.push_back(std::sqrt(w0) * identity(d));
  if (w > 0.0) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        if (j == 0 && k == 0) continue;
        ops.push_back(std::sqrt(w) * weyl_operator(d, j, k));
      }
    }
  }
  return ops;
}

std::vector<ComplexMatrix> kraus_operators(const QuantumChannel& channel) {
  std::vector<ComplexMatrix> out;
  bool first = true;
  for (const auto* leaf : channel.leaves()) {
    std::vector<ComplexMatrix> local;
    if (const auto* dep = std::get_if<DepolarizingForm>(&leaf->form())) {
      local = kraus_of_depolarizing(dep->d, dep->q);
    } else {
      local = std::get<KrausForm>(leaf->form()).ops;
    }
    if (first) {
      out = std::move(local);
      first = false;
      continue;
    }
    std::vector<ComplexMatrix> next;
    next.reserve(out.size() * local.size());
    for (const auto& a : out) {
      for (const auto& b : local) next.push_back(tensor_product(a, b));
    }
    out = std::move(next);
  }
  return out;
}

ComplexMatrix apply_kraus(std::span<const ComplexMatrix> ops, const ComplexMatrix& s) {
  if (ops.empty()) throw std::invalid_argument("Kraus list is empty");
  const std::size_t d = square_dim(s);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& a : ops) {
    if (square_dim(a) != d) throw std::invalid_argument("Kraus operator dimension mismatch");
    out.noalias() += a * s * a.adjoint();
  }
  return out;
}

ChoiMatrix choi_of_map(std::size_t d, const std::function<ComplexMatrix(const ComplexMatrix&)>& map) {
  ComplexMatrix c = ComplexMatrix::Zero(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(i, j) = 1.0;
      const ComplexMatrix image = map(e);
      if (image.rows() != static_cast<Eigen::Index>(d) || image.cols() != static_cast<Eigen::Index>(d)) {
        throw std::invalid_argument("map changes dimension");
      }
      // output factor first: C[(a, i), (b, j)] = Phi(E_ij)[a, b]
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) c(a * d + i, b * d + j) = image(a, b);
      }
    }
  }
  return ChoiMatrix{std::move(c), d};
}

ChoiMatrix choi(const QuantumChannel& channel) {
  return choi_of_map(channel.dim(), [&](const ComplexMatrix& e) { return apply(channel, e); });
}

ValidityReport validate(const ChoiMatrix& c) {
  ValidityReport r;
  const std::size_t dd[2] = {c.d, c.d};
  const ComplexMatrix reduced = partial_trace(c.matrix, dd, SubsetMask::of(2, {0}));
  r.tp_residual = operator_norm_hermitian(reduced - identity(c.d));
  const RealVector ev = hermitian_eigen_unchecked(c.matrix).values;
  r.min_choi_eigenvalue = ev(ev.size() - 1);
  r.trace_preserving = r.tp_residual <= kValidityTol;
  r.completely_positive = r.min_choi_eigenvalue >= -kValidityTol;
  return r;
}

ValidityReport validate(const QuantumChannel& channel) {
  ValidityReport r;
  r.tp_residual = operator_norm_hermitian(apply_adjoint(channel, identity(channel.dim())) - identity(channel.dim()));

  // The Choi matrix of a product is a permuted tensor product of the factor
  // Choi matrices, so its spectrum is all products of factor eigenvalues.
  // Products are multilinear, hence extremal at the per-factor extremes.
  std::vector<std::pair<double, double>> ranges;
  for (const auto* leaf : channel.leaves()) {
    const RealVector ev = hermitian_eigen_unchecked(choi(*leaf).matrix).values;
    ranges.emplace_back(ev(ev.size() - 1), ev(0));
  }
  double lo = std::numeric_limits<double>::infinity();
  const std::size_t combos = std::size_t{1} << ranges.size();
  for (std::size_t m = 0; m < combos; ++m) {
    double prod = 1.0;
    for (std::size_t i = 0; i < ranges.size(); ++i) prod *= ((m >> i) & 1u) ? ranges[i].second : ranges[i].first;
    lo = std::min(lo, prod);
  }
  r.min_choi_eigenvalue = lo;
  r.trace_preserving = r.tp_residual <= kValidityTol;
  r.completely_positive = r.min_choi_eigenvalue >= -kValidityTol;
  r.boundary_parameter = channel.has_boundary_parameter();
  return r;
}

ComplexMatrix conditional_expectation(const ComplexMatrix& s, std::span<const std::size_t> dims,
                                      const SubsetMask& subset) {
  const std::size_t d = square_dim(s);
  check_dims(dims, d);
  if (subset.n() != dims.size()) throw std::invalid_argument("conditional_expectation: subset mask and dims disagree");
  if (subset.is_empty()) return s;

  const ComplexMatrix reduced = partial_trace(s, dims, subset);
  const SplitIndex split = split_index(dims, subset);
  const std::size_t inner = split.inside_dim;
  const double norm = 1.0 / static_cast<double>(inner);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t o1 = 0; o1 < split.outside_dim; ++o1) {
    for (std::size_t o2 = 0; o2 < split.outside_dim; ++o2) {
      const Complex v = reduced(o1, o2) * norm;
      for (std::size_t x = 0; x < inner; ++x) out(split.full[o1 * inner + x], split.full[o2 * inner + x]) = v;
    }
  }
  return out;
}

double expansion_weight(std::span<const DepolarizingForm> factors, const SubsetMask& subset) {
  if (subset.n() != factors.size()) throw std::invalid_argument("expansion_weight: subset mask and factors disagree");
  double w = 1.0;
  for (std::size_t i = 0; i < factors.size(); ++i) w *= subset.contains(i) ? factors[i].q : 1.0 - factors[i].q;
  return w;
}

ComplexMatrix expansion_apply(std::span<const DepolarizingForm> factors, const ComplexMatrix& s,
                              std::size_t max_factors) {
  const std::size_t n = factors.size();
  if (n == 0) throw std::invalid_argument("expansion_apply needs at least one factor");
  if (n > max_factors || n >= SubsetMask::kMaxFactors) {
    throw std::invalid_argument("expansion over " + std::to_string(n) + " factors exceeds the cap of " +
                                std::to_string(max_factors) + " (cost 2^n)");
  }
  FactorDims dims;
  for (const auto& f : factors) dims.push_back(f.d);
  const std::size_t d = square_dim(s);
  check_dims(dims, d);

  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    const SubsetMask subset(n, bits);
    const double w = expansion_weight(factors, subset);
    if (w == 0.0) continue;
    out += w * conditional_expectation(s, dims, subset);
  }
  return out;
}

QuantumChannel random_kraus_channel(std::size_t d, std::size_t kraus_count, Rng& rng) {
  if (d == 0 || kraus_count == 0) throw std::invalid_argument("random channel needs d >= 1 and at least one Kraus operator");
  const ComplexMatrix v = haar_isometry(d * kraus_count, d, rng);
  std::vector<ComplexMatrix> ops;
  ops.reserve(kraus_count);
  for (std::size_t k = 0; k < kraus_count; ++k) ops.push_back(v.block(k * d, 0, d, d));
  return QuantumChannel::kraus(std::move(ops));
}

}  // namespace qmult
