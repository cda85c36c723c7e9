#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "qmult/linalg.hpp"
#include "qmult/random.hpp"
#include "qmult/subset.hpp"

namespace qmult {

class QuantumChannel;

// Phi(S) = sum_k A_k S A_k^dagger. Trace preservation is not enforced at
// construction; validate() reports it.
struct KrausForm {
  std::vector<ComplexMatrix> ops;
};

// Phi(S) = (1 - q) S + (q / d) Tr(S) I.
struct DepolarizingForm {
  std::size_t d = 2;
  double q = 0.0;
};

// Phi_1 (x) ... (x) Phi_n, factor 0 leftmost.
struct ProductForm {
  std::vector<QuantumChannel> factors;
};

class QuantumChannel {
public:
  using Form = std::variant<KrausForm, DepolarizingForm, ProductForm>;

  static QuantumChannel kraus(std::vector<ComplexMatrix> ops);
  // Requires d >= 1 and 0 <= q <= 1; q in {0, 1} sets the boundary flag.
  static QuantumChannel depolarizing(std::size_t d, double q);
  static QuantumChannel product(std::vector<QuantumChannel> factors);
  static QuantumChannel identity(std::size_t d);

  const Form& form() const { return form_; }
  bool is_kraus() const { return std::holds_alternative<KrausForm>(form_); }
  bool is_depolarizing() const { return std::holds_alternative<DepolarizingForm>(form_); }
  bool is_product() const { return std::holds_alternative<ProductForm>(form_); }

  std::size_t dim() const { return dim_; }
  // Factor dims after flattening nested products.
  FactorDims dims() const;
  // Kraus or depolarizing leaves in factor order, nested products flattened.
  std::vector<const QuantumChannel*> leaves() const;
  // True when every leaf is depolarizing.
  bool is_depolarizing_product() const;
  // Some depolarizing leaf sits at q = 0 or q = 1.
  bool has_boundary_parameter() const;

  // Short human-readable form, e.g. "depolarizing(d=2,q=0.5) x kraus(d=3,k=4)".
  std::string describe() const;

private:
  explicit QuantumChannel(Form form, std::size_t dim) : form_(std::move(form)), dim_(dim) {}

  Form form_;
  std::size_t dim_ = 0;
};

// Channel action. Linear in s; s need not be Hermitian or positive.
// Function object: unqualified calls must not find std::apply through ADL.
struct ApplyChannelFn {
  ComplexMatrix operator()(const QuantumChannel& channel, const ComplexMatrix& s) const;
};
inline constexpr ApplyChannelFn apply{};

// Adjoint map S -> sum_k A_k^dagger S A_k. Depolarizing leaves are self-adjoint.
ComplexMatrix apply_adjoint(const QuantumChannel& channel, const ComplexMatrix& s);

// Applies `block_map` to factor `slot` only, identity on the others.
ComplexMatrix apply_on_factor(const ComplexMatrix& s, std::span<const std::size_t> dims, std::size_t slot,
                              const std::function<ComplexMatrix(const ComplexMatrix&)>& block_map);

// Discrete Weyl construction: sqrt(1 - q (d^2-1)/d^2) I and sqrt(q/d^2) X^j Z^k
// for (j, k) != (0, 0). Zero-weight operators are dropped (q = 0 gives {I}).
std::vector<ComplexMatrix> kraus_of_depolarizing(std::size_t d, double q);
// X^j Z^k with X|i> = |i+1 mod d>, Z|i> = w^i |i>, w = exp(2 pi i / d).
ComplexMatrix weyl_operator(std::size_t d, std::size_t j, std::size_t k);

// Full-space Kraus operators; a product expands to all tensor combinations.
std::vector<ComplexMatrix> kraus_operators(const QuantumChannel& channel);
ComplexMatrix apply_kraus(std::span<const ComplexMatrix> ops, const ComplexMatrix& s);

// Choi matrix sum_ij Phi(|i><j|) (x) |i><j|: output factor first, reference second.
struct ChoiMatrix {
  ComplexMatrix matrix;
  std::size_t d = 0;
};

ChoiMatrix choi(const QuantumChannel& channel);
ChoiMatrix choi_of_map(std::size_t d, const std::function<ComplexMatrix(const ComplexMatrix&)>& map);

struct ValidityReport {
  double tp_residual = 0.0;           // ||Phi*(I) - I||_inf
  double min_choi_eigenvalue = 0.0;
  bool trace_preserving = false;
  bool completely_positive = false;
  bool boundary_parameter = false;    // warning only
  bool passed() const { return trace_preserving && completely_positive; }
};

inline constexpr double kValidityTol = 1e-9;

ValidityReport validate(const QuantumChannel& channel);
ValidityReport validate(const ChoiMatrix& choi);

// eps_L(A) = Tr_{H_L} A (x) I_L / d_L, returned on the full space with the
// identity re-inserted at the positions of L.
ComplexMatrix conditional_expectation(const ComplexMatrix& s, std::span<const std::size_t> dims, const SubsetMask& subset);

// prod_i q_i^theta_L(i) (1 - q_i)^(1 - theta_L(i))
double expansion_weight(std::span<const DepolarizingForm> factors, const SubsetMask& subset);

inline constexpr std::size_t kDefaultExpansionCap = 10;

// sum over all 2^n subsets L (increasing bitmask) of expansion_weight * eps_L(s).
ComplexMatrix expansion_apply(std::span<const DepolarizingForm> factors, const ComplexMatrix& s,
                              std::size_t max_factors = kDefaultExpansionCap);

// Kraus operators taken as consecutive d x d blocks of a Haar isometry C^d -> C^(d k).
QuantumChannel random_kraus_channel(std::size_t d, std::size_t kraus_count, Rng& rng);

}  // namespace qmult
