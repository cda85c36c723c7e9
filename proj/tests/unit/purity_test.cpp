#include <cmath>

#include <gtest/gtest.h>

#include "qmult/purity.hpp"
#include "support/oracles.hpp"

namespace qmult {
namespace {

const NormOrder kInf = NormOrder::infinity();

AscentOptions quick(std::uint64_t seed = 1, std::size_t restarts = 16) {
  AscentOptions o;
  o.seed = seed;
  o.restarts = restarts;
  return o;
}

TEST(ClosedForm, NoiselessChannelIsPure) {
  for (std::size_t d : {2u, 3u, 7u}) {
    for (const auto& p : {NormOrder(1.0), NormOrder(2.0), NormOrder(3.5), kInf}) {
      EXPECT_DOUBLE_EQ(closed_form_nu_p(d, 0.0, p), 1.0);
    }
  }
}

TEST(ClosedForm, HandSubstitution) {
  // sqrt(0.75^2 + 0.25^2)
  EXPECT_NEAR(closed_form_nu_p(2, 0.5, NormOrder(2.0)), 0.790569415042094833, 1e-15);
  // (0.6^3 + 2 * 0.2^3)^(1/3) = 0.232^(1/3)
  EXPECT_NEAR(closed_form_nu_p(3, 0.6, NormOrder(3.0)), 0.614463365137169459, 1e-15);
  EXPECT_DOUBLE_EQ(closed_form_nu_p(2, 0.5, kInf), 0.75);
}

TEST(ClosedForm, MatchesOutputEigendecomposition) {
  for (std::size_t d : {2u, 3u, 4u}) {
    for (double q : {0.2, 0.6, 0.95}) {
      const ComplexMatrix out = apply(QuantumChannel::depolarizing(d, q), sample_haar_state(d, 77).projector());
      for (const auto& p : {NormOrder(2.0), NormOrder(3.0), NormOrder(2.5), kInf}) {
        EXPECT_NEAR(closed_form_nu_p(d, q, p), schatten_norm(out, p), 1e-13);
      }
    }
  }
}

TEST(ClosedFormProduct, SingleFactor) {
  const std::vector<DepolarizingForm> f{{3, 0.4}};
  EXPECT_DOUBLE_EQ(closed_form_product_nu_p(f, NormOrder(3.0)).value, closed_form_nu_p(3, 0.4, NormOrder(3.0)));
}

TEST(ClosedFormProduct, TwoQubits) {
  const std::vector<DepolarizingForm> f{{2, 0.3}, {2, 0.7}};
  // sqrt(0.85^2 + 0.15^2) * sqrt(0.65^2 + 0.35^2)
  const ProductClosedForm cf = closed_form_product_nu_p(f, NormOrder(2.0));
  EXPECT_NEAR(cf.value, 0.637200910231616038, 1e-15);
  EXPECT_FALSE(cf.conjectural);
}

TEST(ClosedFormProduct, TraceNormIsOne) {
  const std::vector<DepolarizingForm> f{{2, 0.3}, {3, 0.9}, {4, 0.1}};
  EXPECT_NEAR(closed_form_product_nu_p(f, NormOrder(1.0)).value, 1.0, 1e-15);
}

TEST(ClosedFormProduct, NonIntegerOrderIsConjectural) {
  const std::vector<DepolarizingForm> f{{2, 0.3}};
  EXPECT_TRUE(closed_form_product_nu_p(f, NormOrder(1.5)).conjectural);
  EXPECT_FALSE(closed_form_product_nu_p(f, kInf).conjectural);
}

TEST(Maximize, IdentityChannelIsPure) {
  for (const auto& p : {NormOrder(1.0), NormOrder(2.0), NormOrder(3.0), kInf}) {
    const PurityReport r = maximize_output_norm(QuantumChannel::identity(3), p, quick());
    EXPECT_NEAR(r.nu_p, 1.0, 1e-12);
  }
}

TEST(Maximize, QubitDepolarizingP2) {
  const PurityReport r = maximize_output_norm(QuantumChannel::depolarizing(2, 0.5), NormOrder(2.0), quick());
  EXPECT_NEAR(r.nu_p, 0.790569415042094833, 1e-9);
  ASSERT_TRUE(r.closed_form.has_value());
  EXPECT_TRUE(r.converged);
}

TEST(Maximize, QubitPairP3ReachesProductState) {
  const auto ch = QuantumChannel::product({QuantumChannel::depolarizing(2, 0.3), QuantumChannel::depolarizing(2, 0.7)});
  const PurityReport r = maximize_output_norm(ch, NormOrder(3.0), quick(5));
  const std::vector<DepolarizingForm> f{{2, 0.3}, {2, 0.7}};
  EXPECT_NEAR(r.nu_p, closed_form_product_nu_p(f, NormOrder(3.0)).value, 1e-8);

  // Product state: the reduced state of the maximizer is pure.
  const FactorDims dims{2, 2};
  const ComplexMatrix reduced = partial_trace(r.maximizer.projector(), dims, SubsetMask::of(2, {1}));
  EXPECT_NEAR(hermitian_spectrum(reduced)(0), 1.0, 1e-6);
}

TEST(Maximize, ReportedValueIsRecomputable) {
  Rng rng = make_rng(211);
  const auto ch = QuantumChannel::product({random_kraus_channel(2, 2, rng), random_kraus_channel(2, 3, rng)});
  for (const auto& p : {NormOrder(2.0), NormOrder(2.5), kInf}) {
    const PurityReport r = maximize_output_norm(ch, p, quick(3));
    EXPECT_NEAR(r.nu_p, schatten_norm(apply(ch, r.maximizer.projector()), p), 1e-12);
    EXPECT_GT(r.nu_p, 0.0);
    EXPECT_LE(r.nu_p, 1.0 + 1e-12);
  }
}

TEST(Maximize, AscentIsMonotone) {
  Rng rng = make_rng(223);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ch = random_kraus_channel(3, 2, rng);
    for (const auto& p : {NormOrder(2.0), NormOrder(3.0), NormOrder(1.7), kInf}) {
      const PurityReport r = maximize_output_norm(ch, p, quick(trial, 8));
      EXPECT_LE(r.max_step_decrease, 1e-12) << ch.describe() << " p=" << p.to_string();
      for (std::size_t i = 1; i < r.ascent_trace.size(); ++i) {
        EXPECT_GE(r.ascent_trace[i], r.ascent_trace[i - 1] - 1e-12);
      }
    }
  }
}

TEST(Maximize, NonincreasingInOrder) {
  Rng rng = make_rng(227);
  const auto ch = random_kraus_channel(3, 3, rng);
  const std::vector<NormOrder> orders{NormOrder(1.0), NormOrder(2.0), NormOrder(3.0), NormOrder(4.0), kInf};
  double prev = 2.0;
  for (const auto& p : orders) {
    const double nu = maximize_output_norm(ch, p, quick(9, 32)).nu_p;
    EXPECT_LE(nu, prev + 1e-9);
    prev = nu;
  }
}

TEST(Maximize, PEqualsOneShortCircuits) {
  Rng rng = make_rng(229);
  const PurityReport r = maximize_output_norm(random_kraus_channel(3, 2, rng), NormOrder(1.0), quick());
  EXPECT_TRUE(r.short_circuit);
  EXPECT_EQ(r.nu_p, 1.0);
  // An invalid channel does not short-circuit.
  const PurityReport bad = maximize_output_norm(QuantumChannel::kraus({0.5 * identity(2)}), NormOrder(1.0), quick());
  EXPECT_FALSE(bad.short_circuit);
  EXPECT_NEAR(bad.nu_p, 0.25, 1e-12);
}

TEST(Maximize, DeterministicAcrossThreadCounts) {
  Rng rng = make_rng(233);
  const auto ch = QuantumChannel::product({random_kraus_channel(2, 2, rng), QuantumChannel::depolarizing(3, 0.4)});
  AscentOptions a = quick(17, 12);
  AscentOptions b = a;
  b.threads = 4;
  const PurityReport ra = maximize_output_norm(ch, NormOrder(2.0), a);
  const PurityReport rb = maximize_output_norm(ch, NormOrder(2.0), b);
  EXPECT_EQ(ra.nu_p, rb.nu_p);
  EXPECT_EQ(ra.best_restart, rb.best_restart);
  EXPECT_EQ(ra.maximizer.amplitudes(), rb.maximizer.amplitudes());
  EXPECT_EQ(ra.iterations, rb.iterations);
}

TEST(Maximize, RejectsBadOptions) {
  AscentOptions o;
  o.restarts = 0;
  EXPECT_THROW(maximize_output_norm(QuantumChannel::identity(2), NormOrder(2.0), o), std::invalid_argument);
  o.restarts = 1;
  o.tol = 0.0;
  EXPECT_THROW(maximize_output_norm(QuantumChannel::identity(2), NormOrder(2.0), o), std::invalid_argument);
}

TEST(PrincipalEigenvector, DegenerateTieBreakAndPhase) {
  // Eigenspace of 1 is span{e0, e1}; any solver basis gets resolved the same way.
  ComplexMatrix m = testing::diag({1.0, 1.0, 0.2});
  const ComplexVector v = principal_eigenvector(m);
  EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  EXPECT_NEAR(v(0).imag(), 0.0, 1e-15);
  EXPECT_GT(v(0).real(), 0.0);
  EXPECT_EQ(principal_eigenvector(m), v);

  ComplexMatrix phased = ComplexMatrix::Zero(2, 2);
  const ComplexVector u = ComplexVector::Constant(2, Complex(0.0, 1.0 / std::sqrt(2.0)));
  phased = u * u.adjoint();
  const ComplexVector w = principal_eigenvector(phased);
  EXPECT_NEAR(w(0).imag(), 0.0, 1e-15);
  EXPECT_NEAR(w(0).real(), 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(OneToPRatio, MaximizerAttainsNu) {
  const auto ch = QuantumChannel::depolarizing(3, 0.3);
  const PurityReport r = maximize_output_norm(ch, NormOrder(2.0), quick());
  EXPECT_NEAR(norm_1_to_p_ratio(ch, r.maximizer.projector(), NormOrder(2.0)), r.nu_p, 1e-12);
}

TEST(OneToPRatio, TracelessInput) {
  // Phi(a) = (1 - q) a for traceless a, so the ratio is (1 - q) sqrt(2) / 2.
  for (double q : {0.1, 0.5, 0.9}) {
    const auto ch = QuantumChannel::depolarizing(2, q);
    const double ratio = norm_1_to_p_ratio(ch, testing::diag({1.0, -1.0}), NormOrder(2.0));
    EXPECT_NEAR(ratio, (1.0 - q) * std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_LT(ratio, closed_form_nu_p(2, q, NormOrder(2.0)));
  }
  EXPECT_NEAR(norm_1_to_p_ratio(QuantumChannel::depolarizing(2, 0.5), testing::diag({1.0, -1.0}), NormOrder(2.0)),
              0.353553390593273762, 1e-15);
}

TEST(OneToPRatio, NeverExceedsNu) {
  Rng rng = make_rng(239);
  const auto ch = random_kraus_channel(3, 2, rng);
  for (const auto& p : {NormOrder(2.0), NormOrder(3.0), kInf}) {
    const double nu = maximize_output_norm(ch, p, quick(1, 32)).nu_p;
    for (int trial = 0; trial < 1000; ++trial) {
      EXPECT_LE(norm_1_to_p_ratio(ch, random_hermitian(3, rng), p), nu + 1e-9);
    }
  }
}

TEST(OneToPRatio, RejectsZeroInput) {
  EXPECT_THROW(norm_1_to_p_ratio(QuantumChannel::identity(2), ComplexMatrix::Zero(2, 2), NormOrder(2.0)),
               std::invalid_argument);
}

TEST(Multiplicativity, DepolarizingP2AndInfinity) {
  const std::vector<QuantumChannel> f{QuantumChannel::depolarizing(2, 0.3), QuantumChannel::depolarizing(3, 0.7)};
  MultiplicativityOptions o;
  o.ascent = quick(4);
  for (const auto& p : {NormOrder(2.0), kInf}) {
    const MultiplicativityReport r = check_multiplicativity(f, p, o);
    EXPECT_EQ(r.verdict, Verdict::consistent);
    EXPECT_LE(std::abs(r.gap), 1e-8);
  }
}

TEST(Multiplicativity, DepolarizingP3) {
  const std::vector<QuantumChannel> f{QuantumChannel::depolarizing(2, 0.3), QuantumChannel::depolarizing(2, 0.7),
                                      QuantumChannel::depolarizing(2, 0.5)};
  MultiplicativityOptions o;
  o.ascent = quick(6);
  const MultiplicativityReport r = check_multiplicativity(f, NormOrder(3.0), o);
  EXPECT_EQ(r.verdict, Verdict::consistent);
  ASSERT_TRUE(r.closed_form.has_value());
  EXPECT_NEAR(r.lhs, r.closed_form->value, 1e-8);
}

TEST(Multiplicativity, SingleFactorIsExact) {
  Rng rng = make_rng(241);
  const std::vector<QuantumChannel> f{random_kraus_channel(3, 2, rng)};
  const MultiplicativityReport r = check_multiplicativity(f, NormOrder(2.0));
  EXPECT_EQ(r.lhs, r.rhs);
  EXPECT_EQ(r.gap, 0.0);
  EXPECT_EQ(r.verdict, Verdict::consistent);
}

TEST(Multiplicativity, RejectsOversizedProduct) {
  const std::vector<QuantumChannel> f(7, QuantumChannel::depolarizing(2, 0.5));
  EXPECT_THROW(check_multiplicativity(f, NormOrder(2.0)), std::invalid_argument);
}

TEST(QToP, IdentityWithEqualOrders) {
  for (const auto& p : {NormOrder(1.0), NormOrder(2.0), NormOrder(3.0), kInf}) {
    EXPECT_NEAR(norm_q_to_p_estimate(QuantumChannel::identity(3), p, p, quick()).value, 1.0, 1e-12);
  }
}

TEST(QToP, OneToInfinityDepolarizing) {
  // Largest output eigenvalue of a pure input: 1 - q/2.
  EXPECT_NEAR(norm_q_to_p_estimate(QuantumChannel::depolarizing(2, 0.5), NormOrder(1.0), kInf, quick()).value, 0.75,
              1e-12);
}

TEST(QToP, QEqualsOneMatchesPurity) {
  Rng rng = make_rng(251);
  for (int trial = 0; trial < 3; ++trial) {
    const auto ch = random_kraus_channel(3, 2, rng);
    for (const auto& p : {NormOrder(2.0), NormOrder(3.0)}) {
      const double nu = maximize_output_norm(ch, p, quick(trial, 32)).nu_p;
      const double est = norm_q_to_p_estimate(ch, NormOrder(1.0), p, quick(trial + 100, 32)).value;
      EXPECT_NEAR(est, nu, 1e-6);
    }
  }
}

TEST(QToP, IntermediateOrderIsBounded) {
  // ||Phi||_{q->p} lies between its value on the maximizing projector and
  // d^(1 - 1/q) nu_p (Hoelder).
  const auto ch = QuantumChannel::depolarizing(2, 0.4);
  const double est = norm_q_to_p_estimate(ch, NormOrder(2.0), NormOrder(3.0), quick()).value;
  const double nu3 = closed_form_nu_p(2, 0.4, NormOrder(3.0));
  EXPECT_GE(est, nu3 - 1e-12);
  EXPECT_LE(est, std::sqrt(2.0) * nu3 + 1e-12);
}

TEST(QToP, RejectsQAboveP) {
  EXPECT_THROW(norm_q_to_p_estimate(QuantumChannel::identity(2), NormOrder(3.0), NormOrder(2.0)),
               std::invalid_argument);
}

}  // namespace
}  // namespace qmult
