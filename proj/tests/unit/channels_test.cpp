#include <cmath>

#include <gtest/gtest.h>

#include "qmult/channels.hpp"
#include "support/oracles.hpp"

namespace qmult {
namespace {

using testing::max_abs_diff;

TEST(Apply, DepolarizingPureProjectorSpectrum) {
  for (double q : {0.1, 0.3, 0.5, 0.9}) {
    const auto ch = QuantumChannel::depolarizing(2, q);
    const RealVector ev = hermitian_spectrum(apply(ch, sample_haar_state(2, 3).projector()));
    EXPECT_NEAR(ev(0), 1.0 - q / 2.0, 1e-14);
    EXPECT_NEAR(ev(1), q / 2.0, 1e-14);
  }
}

TEST(Apply, MaximallyMixedIsFixed) {
  for (std::size_t d : {2u, 3u, 5u}) {
    const ComplexMatrix mixed = identity(d) / static_cast<double>(d);
    EXPECT_LT(max_abs_diff(apply(QuantumChannel::depolarizing(d, 0.37), mixed), mixed), 1e-16);
  }
}

TEST(Apply, DepolarizingMatchesFormula) {
  Rng rng = make_rng(101);
  const auto ch = QuantumChannel::depolarizing(3, 0.42);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix s = random_hermitian(3, rng);
    EXPECT_LT(max_abs_diff(apply(ch, s), testing::depolarize_direct(s, 0.42)), 1e-15);
  }
}

TEST(Apply, KrausFormAgreesWithDepolarizing) {
  Rng rng = make_rng(103);
  const auto direct = QuantumChannel::depolarizing(2, 0.5);
  const auto kraus = QuantumChannel::kraus(kraus_of_depolarizing(2, 0.5));
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix s = random_hermitian(2, rng);
    EXPECT_LT(max_abs_diff(apply(kraus, s), apply(direct, s)), 1e-12);
  }
}

TEST(Apply, RejectsDimensionMismatch) {
  EXPECT_THROW(apply(QuantumChannel::depolarizing(2, 0.5), identity(3)), std::invalid_argument);
}

TEST(Apply, TracePreservingLinearPositive) {
  Rng rng = make_rng(107);
  const auto ch = QuantumChannel::product(
      {QuantumChannel::depolarizing(2, 0.3), random_kraus_channel(3, 2, rng), QuantumChannel::depolarizing(2, 0.8)});
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_hermitian(12, rng);
    const ComplexMatrix b = random_hermitian(12, rng);
    const ComplexMatrix out = apply(ch, a);
    EXPECT_NEAR(testing::trace(out).real(), testing::trace(a).real(), 1e-10);
    EXPECT_LT(max_abs_diff(apply(ch, 0.3 * a - 2.0 * b), 0.3 * out - 2.0 * apply(ch, b)), 1e-12);

    const ComplexMatrix rho = random_density(12, rng);
    const RealVector ev = hermitian_spectrum(apply(ch, rho));
    EXPECT_GE(ev(ev.size() - 1), -1e-9);
    EXPECT_NEAR(ev.sum(), 1.0, 1e-10);
  }
}

TEST(Apply, ProductMatchesTensorKraus) {
  Rng rng = make_rng(109);
  const auto ch = QuantumChannel::product({random_kraus_channel(2, 3, rng), QuantumChannel::depolarizing(3, 0.6)});
  const auto ops = kraus_operators(ch);
  EXPECT_EQ(ops.size(), 3u * 9u);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix s = random_hermitian(6, rng);
    EXPECT_LT(max_abs_diff(apply(ch, s), apply_kraus(ops, s)), 1e-12);
    EXPECT_LT(max_abs_diff(apply_adjoint(ch, s), [&] {
                ComplexMatrix acc = ComplexMatrix::Zero(6, 6);
                for (const auto& a : ops) acc += a.adjoint() * s * a;
                return acc;
              }()),
              1e-12);
  }
}

TEST(Apply, NestedProductFlattens) {
  const auto inner = QuantumChannel::product({QuantumChannel::depolarizing(2, 0.1), QuantumChannel::depolarizing(3, 0.2)});
  const auto outer = QuantumChannel::product({inner, QuantumChannel::depolarizing(2, 0.3)});
  EXPECT_EQ(outer.dim(), 12u);
  EXPECT_EQ(outer.dims(), (FactorDims{2, 3, 2}));
  EXPECT_TRUE(outer.is_depolarizing_product());
  EXPECT_EQ(outer.describe(), "(depolarizing(d=2,q=0.1) x depolarizing(d=3,q=0.2)) x depolarizing(d=2,q=0.3)");
}

TEST(KrausOfDepolarizing, ZeroNoiseIsIdentity) {
  const auto ops = kraus_of_depolarizing(3, 0.0);
  ASSERT_EQ(ops.size(), 1u);
  EXPECT_LT(max_abs_diff(ops.front(), identity(3)), 1e-16);
}

TEST(KrausOfDepolarizing, QubitMatchesPauliForm) {
  // (1 - 3q/4) s + (q/4) sum_sigma sigma s sigma = (1 - q) s + (q/2) Tr(s) I
  Rng rng = make_rng(113);
  for (double q : {0.0, 0.2, 0.5, 0.75, 1.0}) {
    const auto ops = kraus_of_depolarizing(2, q);
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix s = random_hermitian(2, rng);
      ComplexMatrix pauli = (1.0 - 0.75 * q) * s;
      for (const auto& sigma : {testing::pauli_x(), testing::pauli_y(), testing::pauli_z()}) {
        pauli += (q / 4.0) * sigma * s * sigma;
      }
      EXPECT_LT(max_abs_diff(pauli, testing::depolarize_direct(s, q)), 1e-14);
      EXPECT_LT(max_abs_diff(apply_kraus(ops, s), pauli), 1e-14);
    }
  }
}

TEST(KrausOfDepolarizing, QutritCompleteness) {
  const auto ops = kraus_of_depolarizing(3, 0.5);
  ASSERT_EQ(ops.size(), 9u);
  ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
  for (const auto& a : ops) sum += a.adjoint() * a;
  EXPECT_LT(max_abs_diff(sum, identity(3)), 1e-12);
}

TEST(KrausOfDepolarizing, ReproducesFormulaOnMatrixUnits) {
  for (std::size_t d : {2u, 3u, 4u}) {
    const auto ops = kraus_of_depolarizing(d, 0.35);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(d, d);
        e(i, j) = 1.0;
        EXPECT_LT(max_abs_diff(apply_kraus(ops, e), testing::depolarize_direct(e, 0.35)), 1e-12);
      }
    }
  }
}

TEST(Choi, IdentityChannelIsRankOne) {
  const RealVector ev = hermitian_spectrum(choi(QuantumChannel::identity(2)).matrix);
  EXPECT_NEAR(ev(0), 2.0, 1e-14);
  for (Eigen::Index i = 1; i < ev.size(); ++i) EXPECT_NEAR(ev(i), 0.0, 1e-14);
}

TEST(Choi, DepolarizingSpectrum) {
  for (std::size_t d : {2u, 3u}) {
    for (double q : {0.25, 0.7}) {
      const ChoiMatrix c = choi(QuantumChannel::depolarizing(d, q));
      // (1-q)|Omega><Omega| + (q/d) I: Omega has squared norm d.
      const ComplexVector w = testing::omega(d);
      const ComplexMatrix expected =
          (1.0 - q) * w * w.adjoint() + (q / static_cast<double>(d)) * identity(d * d);
      EXPECT_LT(max_abs_diff(c.matrix, expected), 1e-14);

      const RealVector ev = hermitian_spectrum(c.matrix);
      const double dd = static_cast<double>(d);
      EXPECT_NEAR(ev(0), dd * (1.0 - q) + q / dd, 1e-12);
      for (Eigen::Index i = 1; i < ev.size(); ++i) EXPECT_NEAR(ev(i), q / dd, 1e-12);
    }
  }
}

TEST(Choi, TransposeMapIsNotCompletelyPositive) {
  const ChoiMatrix c = choi_of_map(2, [](const ComplexMatrix& s) { return ComplexMatrix(s.transpose()); });
  const RealVector ev = hermitian_spectrum(c.matrix);
  EXPECT_NEAR(ev(ev.size() - 1), -1.0, 1e-14);
  const ValidityReport r = validate(c);
  EXPECT_TRUE(r.trace_preserving);
  EXPECT_FALSE(r.completely_positive);
  EXPECT_FALSE(r.passed());
}

TEST(Validate, DepolarizingPasses) {
  const ValidityReport r = validate(QuantumChannel::depolarizing(3, 0.5));
  EXPECT_TRUE(r.passed());
  EXPECT_LT(r.tp_residual, 1e-12);
  EXPECT_FALSE(r.boundary_parameter);
}

TEST(Validate, SubnormalizedKrausFails) {
  const ValidityReport r = validate(QuantumChannel::kraus({0.5 * identity(2)}));
  EXPECT_FALSE(r.trace_preserving);
  EXPECT_NEAR(r.tp_residual, 0.75, 1e-15);
  EXPECT_TRUE(r.completely_positive);
  EXPECT_FALSE(r.passed());
}

TEST(Validate, BoundaryParameterFlagged) {
  EXPECT_TRUE(validate(QuantumChannel::depolarizing(2, 1.0)).boundary_parameter);
  EXPECT_TRUE(validate(QuantumChannel::depolarizing(2, 0.0)).passed());
  EXPECT_THROW(QuantumChannel::depolarizing(2, 1.5), std::invalid_argument);
  EXPECT_THROW(QuantumChannel::depolarizing(2, -0.1), std::invalid_argument);
}

TEST(Validate, ProductOfRandomChannels) {
  Rng rng = make_rng(127);
  const auto ch = QuantumChannel::product({random_kraus_channel(2, 2, rng), random_kraus_channel(3, 3, rng)});
  const ValidityReport r = validate(ch);
  EXPECT_TRUE(r.passed());
  // cross-check the factor-spectrum shortcut against the full Choi matrix
  const RealVector ev = hermitian_spectrum(hermitian_part(choi(ch).matrix));
  EXPECT_NEAR(r.min_choi_eigenvalue, ev(ev.size() - 1), 1e-12);
}

TEST(ConditionalExpectation, EmptySubsetIsIdentityMap) {
  Rng rng = make_rng(131);
  const ComplexMatrix s = random_hermitian(6, rng);
  const FactorDims dims{2, 3};
  EXPECT_EQ(conditional_expectation(s, dims, SubsetMask::empty(2)), s);
}

TEST(ConditionalExpectation, FullSubsetNormalizes) {
  Rng rng = make_rng(137);
  const ComplexMatrix s = random_hermitian(6, rng);
  const FactorDims dims{2, 3};
  EXPECT_LT(max_abs_diff(conditional_expectation(s, dims, SubsetMask::full(2)), testing::trace(s) * identity(6) / 6.0),
            1e-14);
}

TEST(ConditionalExpectation, ProductStateSecondFactor) {
  Rng rng = make_rng(139);
  const ComplexMatrix rho = random_density(2, rng);
  const ComplexMatrix sigma = random_density(2, rng);
  const FactorDims dims{2, 2};
  const ComplexMatrix out = conditional_expectation(tensor_product(rho, sigma), dims, SubsetMask::of(2, {1}));
  EXPECT_LT(max_abs_diff(out, tensor_product(rho, identity(2) / 2.0)), 1e-15);
}

TEST(ConditionalExpectation, FirstFactorReinsertedInPlace) {
  Rng rng = make_rng(149);
  const ComplexMatrix a = random_density(3, rng);
  const ComplexMatrix b = random_density(2, rng);
  const FactorDims dims{3, 2};
  const ComplexMatrix out = conditional_expectation(tensor_product(a, b), dims, SubsetMask::of(2, {0}));
  EXPECT_LT(max_abs_diff(out, tensor_product(identity(3) / 3.0, b)), 1e-15);
}

TEST(ConditionalExpectation, IdempotentTracePreservingCommuting) {
  Rng rng = make_rng(151);
  const FactorDims dims{2, 3, 2};
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix s = random_hermitian(12, rng);
    for (std::uint32_t l = 0; l < 8; ++l) {
      const SubsetMask ml(3, l);
      const ComplexMatrix el = conditional_expectation(s, dims, ml);
      EXPECT_LT(max_abs_diff(conditional_expectation(el, dims, ml), el), 1e-12);
      EXPECT_NEAR(testing::trace(el).real(), testing::trace(s).real(), 1e-12);
      for (std::uint32_t m = 0; m < 8; ++m) {
        const SubsetMask mm(3, m);
        EXPECT_LT(max_abs_diff(conditional_expectation(el, dims, mm), conditional_expectation(s, dims, ml.unite(mm))),
                  1e-12);
      }
    }
  }
}

TEST(ConditionalExpectation, RejectsDimensionMismatch) {
  const FactorDims dims{2, 2};
  EXPECT_THROW(conditional_expectation(identity(6), dims, SubsetMask::of(2, {0})), std::invalid_argument);
}

TEST(Expansion, SingleFactorMatchesDepolarizing) {
  Rng rng = make_rng(157);
  const std::vector<DepolarizingForm> f{{3, 0.4}};
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix s = random_hermitian(3, rng);
    EXPECT_LT(max_abs_diff(expansion_apply(f, s), testing::depolarize_direct(s, 0.4)), 1e-15);
  }
}

TEST(Expansion, TwoQubitsAgreeWithTensorKraus) {
  Rng rng = make_rng(163);
  const std::vector<DepolarizingForm> f{{2, 0.3}, {2, 0.7}};
  const auto ops = kraus_operators(
      QuantumChannel::product({QuantumChannel::depolarizing(2, 0.3), QuantumChannel::depolarizing(2, 0.7)}));
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix rho = random_density(4, rng);
    EXPECT_LT(max_abs_diff(expansion_apply(f, rho), apply_kraus(ops, rho)), 1e-12);
  }
}

TEST(Expansion, FullNoiseLeavesMaximallyMixed) {
  Rng rng = make_rng(167);
  const std::vector<DepolarizingForm> f{{2, 1.0}, {3, 1.0}};
  const ComplexMatrix s = random_hermitian(6, rng);
  EXPECT_LT(max_abs_diff(expansion_apply(f, s), testing::trace(s) * identity(6) / 6.0), 1e-15);
}

TEST(Expansion, WeightsSumToOne) {
  Rng rng = make_rng(173);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<DepolarizingForm> f;
    for (std::size_t i = 0; i < n; ++i) f.push_back({2, u(rng)});
    double total = 0.0;
    for (std::uint32_t l = 0; l < (1u << n); ++l) total += expansion_weight(f, SubsetMask(n, l));
    EXPECT_NEAR(total, 1.0, 1e-15);
  }
}

TEST(Expansion, RejectsTooManyFactors) {
  const std::vector<DepolarizingForm> f(3, DepolarizingForm{2, 0.5});
  EXPECT_THROW(expansion_apply(f, identity(8), 2), std::invalid_argument);
  EXPECT_THROW(expansion_apply(f, identity(4)), std::invalid_argument);
}

TEST(RandomKraus, IsValidChannel) {
  Rng rng = make_rng(179);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ch = random_kraus_channel(3, 2, rng);
    EXPECT_TRUE(validate(ch).passed());
  }
}

}  // namespace
}  // namespace qmult
