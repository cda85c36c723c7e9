#include "qmult/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qmult/random.hpp"

namespace qmult {

std::size_t square_dim(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  if (m.rows() == 0) throw std::invalid_argument("matrix is empty");
  return static_cast<std::size_t>(m.rows());
}

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = max_abs(m);
  if (scale == 0.0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void require_hermitian(const ComplexMatrix& m, const char* what) {
  square_dim(m);
  if (!is_hermitian(m)) throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) * 0.5; }

ComplexMatrix identity(std::size_t d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  ComplexMatrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i) {
    for (Eigen::Index j = 0; j < ac; ++j) {
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) throw std::invalid_argument("tensor product of no factors");
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor_product(out, factors[i]);
  return out;
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims, const SubsetMask& traced) {
  const std::size_t d = square_dim(m);
  check_dims(dims, d);
  if (traced.n() != dims.size()) throw std::invalid_argument("partial_trace: subset mask and dims disagree on factor count");

  const SplitIndex split = split_index(dims, traced);
  const std::size_t kept = split.outside_dim;
  const std::size_t inner = split.inside_dim;
  ComplexMatrix out = ComplexMatrix::Zero(kept, kept);
  for (std::size_t r = 0; r < kept; ++r) {
    for (std::size_t c = 0; c < kept; ++c) {
      Complex acc = 0.0;
      for (std::size_t x = 0; x < inner; ++x) {
        acc += m(split.full[r * inner + x], split.full[c * inner + x]);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

HermitianEigen hermitian_eigen_unchecked(const ComplexMatrix& m) {
  const std::size_t d = square_dim(m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  HermitianEigen out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  // Eigen returns ascending order.
  for (std::size_t i = 0; i < d; ++i) {
    out.values(i) = solver.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return out;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  require_hermitian(m, "hermitian_eigen");
  return hermitian_eigen_unchecked(m);
}

RealVector hermitian_spectrum(const ComplexMatrix& m) { return hermitian_eigen(m).values; }

ComplexMatrix apply_spectral(const HermitianEigen& eig, const std::function<double(double)>& f) {
  RealVector fv(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) fv(i) = f(eig.values(i));
  return eig.vectors * fv.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

double schatten_norm_of_spectrum(const RealVector& spectrum, const NormOrder& p) {
  if (spectrum.size() == 0) return 0.0;
  const double top = spectrum.cwiseAbs().maxCoeff();
  if (p.is_infinite() || top == 0.0) return top;
  const double pv = p.value();
  if (pv == 1.0) return spectrum.cwiseAbs().sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) acc += std::pow(std::abs(spectrum(i)) / top, pv);
  return top * std::pow(acc, 1.0 / pv);
}

double schatten_norm(const ComplexMatrix& m, const NormOrder& p) {
  return schatten_norm_of_spectrum(hermitian_spectrum(m), p);
}

double trace_norm_general(const ComplexMatrix& b) {
  const std::size_t d = square_dim(b);
  ComplexMatrix dilation = ComplexMatrix::Zero(2 * d, 2 * d);
  dilation.topRightCorner(d, d) = b;
  dilation.bottomLeftCorner(d, d) = b.adjoint();
  const RealVector ev = hermitian_eigen_unchecked(dilation).values;
  return 0.5 * ev.cwiseAbs().sum();
}

namespace {

FactorDims single_factor(std::size_t d) { return FactorDims{d}; }

}  // namespace

PureState::PureState(ComplexVector amplitudes, FactorDims dims)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (amplitudes_.size() == 0) throw std::invalid_argument("pure state needs at least one amplitude");
  check_dims(dims_, dim());
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) throw std::invalid_argument("pure state amplitudes are not unit norm");
}

PureState::PureState(ComplexVector amplitudes)
    : PureState(amplitudes, single_factor(static_cast<std::size_t>(amplitudes.size()))) {}

ComplexMatrix PureState::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

DensityOperator::DensityOperator(ComplexMatrix matrix, FactorDims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  const std::size_t d = square_dim(matrix_);
  check_dims(dims_, d);
  require_hermitian(matrix_, "density operator");
  if (std::abs(matrix_.trace() - Complex(1.0)) > kStateTol) throw std::invalid_argument("density operator trace is not 1");
  if (hermitian_eigen_unchecked(matrix_).values(d - 1) < -kStateTol) {
    throw std::invalid_argument("density operator has a negative eigenvalue");
  }
}

DensityOperator::DensityOperator(ComplexMatrix matrix)
    : DensityOperator(matrix, single_factor(square_dim(matrix))) {}

DensityOperator DensityOperator::from(const PureState& psi) { return DensityOperator(psi.projector(), psi.dims()); }

PureState sample_haar_state(std::size_t d, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return PureState(haar_vector(d, rng));
}

}  // namespace qmult
