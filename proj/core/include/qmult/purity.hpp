#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmult/channels.hpp"
#include "qmult/linalg.hpp"
#include "qmult/norm_order.hpp"

namespace qmult {

// nu_p of a single depolarizing channel:
// [(1 - (d-1) q/d)^p + (d-1) (q/d)^p]^(1/p), max(1 - (d-1) q/d, q/d) for p = inf.
double closed_form_nu_p(std::size_t d, double q, const NormOrder& p);

struct ProductClosedForm {
  double value = 0.0;
  // Set for non-integer finite p, where the product formula is not proven.
  bool conjectural = false;
};

ProductClosedForm closed_form_product_nu_p(std::span<const DepolarizingForm> factors, const NormOrder& p);

// Closed form for a channel whose leaves are all depolarizing; nullopt otherwise.
std::optional<ProductClosedForm> closed_form_for(const QuantumChannel& channel, const NormOrder& p);

struct AscentOptions {
  std::size_t restarts = 64;
  std::uint64_t seed = 0;
  // Stop once the objective changes by less than this between iterations.
  double tol = 1e-12;
  std::size_t max_iterations = 1000;
  // Worker threads for restarts. Results do not depend on it.
  std::size_t threads = 1;
  // Extra starting points, indexed after the random restarts.
  std::vector<PureState> warm_starts;
};

struct PurityReport {
  std::string channel;
  NormOrder p{1.0};
  double nu_p = 0.0;
  PureState maximizer{ComplexVector::Ones(1)};
  std::size_t restarts = 0;               // starting points used, warm starts included
  std::vector<std::size_t> iterations;    // per starting point
  std::size_t best_restart = 0;
  bool converged = false;                 // best starting point met the tolerance
  bool short_circuit = false;             // p = 1 on a valid channel
  std::optional<double> closed_form;
  std::vector<double> ascent_trace;       // objective after each step of the best run
  double max_step_decrease = 0.0;         // worst objective drop over all runs, >= 0
};

// Lower bound on nu_p(channel) = max over pure inputs of ||Phi(psi psi^dagger)||_p,
// by fixed-point ascent psi <- top eigenvector of Phi*(Phi(psi psi^dagger)^(p-1))
// from Haar-random starting points (Phi*(v v^dagger), v the top output
// eigenvector, for p = inf).
PurityReport maximize_output_norm(const QuantumChannel& channel, const NormOrder& p, const AscentOptions& options = {});

// Principal eigenvector of a Hermitian matrix. Among eigenvectors of a
// degenerate top eigenvalue the one with the lexicographically largest
// |amplitude| pattern wins; the first nonzero amplitude is made real positive.
ComplexVector principal_eigenvector(const ComplexMatrix& m);

// ||Phi(a)||_p / ||a||_1 for Hermitian a != 0.
double norm_1_to_p_ratio(const QuantumChannel& channel, const ComplexMatrix& a, const NormOrder& p);

enum class Verdict { consistent, violation_candidate, inconclusive };
std::string to_string(Verdict v);

struct MultiplicativityOptions {
  AscentOptions ascent;
  // lhs > rhs + violation_tol flags a violation candidate.
  double violation_tol = 1e-7;
  // lhs < rhs - ascent_slack means the product optimization fell short.
  double ascent_slack = 1e-6;
  std::size_t max_dim = 64;
  // Restart multiplier for re-verifying a candidate.
  std::size_t reverify_factor = 4;
};

struct MultiplicativityReport {
  NormOrder p{1.0};
  double lhs = 0.0;                       // optimized nu_p of the product channel
  double rhs = 0.0;                       // product of optimized per-factor nu_p
  double gap = 0.0;                       // lhs - rhs
  Verdict verdict = Verdict::consistent;
  bool reverified = false;
  std::optional<ProductClosedForm> closed_form;
  PurityReport product_report;
  std::vector<PurityReport> factor_reports;
};

// Compares nu_p of the tensor product with the product of the factors' nu_p.
// The product optimization is warm-started at the tensor product of the factor
// maximizers, so lhs >= rhs up to rounding. Throws if the product dimension
// exceeds options.max_dim.
MultiplicativityReport check_multiplicativity(std::span<const QuantumChannel> factors, const NormOrder& p,
                                              const MultiplicativityOptions& options = {});

struct QToPEstimate {
  double value = 0.0;
  ComplexMatrix maximizer;     // Hermitian, unit q-norm
  std::size_t restarts = 0;
};

// Lower bound on max over Hermitian a of ||Phi(a)||_p / ||a||_q, 1 <= q <= p,
// by a nonlinear power iteration from random Hermitian starting points.
// Only Hermitian inputs are searched.
QToPEstimate norm_q_to_p_estimate(const QuantumChannel& channel, const NormOrder& q, const NormOrder& p,
                                  const AscentOptions& options = {});

}  // namespace qmult
