#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qmult/norm_order.hpp"
#include "qmult/subset.hpp"

namespace qmult {

using Complex = std::complex<double>;
// Dense square matrix of complex scalars. Square shape is checked by every
// operation that consumes one.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;        // relative to max|M|
inline constexpr double kReconstructionTol = 1e-10;   // relative to max|M|
inline constexpr double kStateTol = 1e-10;

std::size_t square_dim(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);

// max|M - M^dagger| <= kHermitianTol * max|M|.
bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTol);
void require_hermitian(const ComplexMatrix& m, const char* what);

// (M + M^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

ComplexMatrix identity(std::size_t d);

// Kronecker product, left factor slowest: (a (x) b)[i*db + k, j*db + l] = a[i,j] b[k,l].
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);

// Traces out the factors in `traced`; the result acts on the complement,
// remaining factors kept in their original order.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims, const SubsetMask& traced);

struct HermitianEigen {
  RealVector values;         // descending
  ComplexMatrix vectors;     // column i belongs to values[i]
};

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
// Rejects inputs that fail is_hermitian().
HermitianEigen hermitian_eigen(const ComplexMatrix& m);
// Same, but symmetrizes instead of checking. For internal iterates whose
// Hermiticity holds up to accumulated rounding.
HermitianEigen hermitian_eigen_unchecked(const ComplexMatrix& m);

RealVector hermitian_spectrum(const ComplexMatrix& m);

// U f(diag) U^dagger
ComplexMatrix apply_spectral(const HermitianEigen& eig, const std::function<double(double)>& f);

// Schatten p-norm of a Hermitian matrix: (sum |lambda|^p)^(1/p), max |lambda| for p = inf.
double schatten_norm(const ComplexMatrix& m, const NormOrder& p);
double schatten_norm_of_spectrum(const RealVector& spectrum, const NormOrder& p);

// Trace norm of an arbitrary square matrix via the Hermitian dilation
// [[0, B], [B^dagger, 0]], whose eigenvalues are +-singular values of B.
double trace_norm_general(const ComplexMatrix& b);

// Unit vector with its dims. The dims product equals the vector length.
class PureState {
public:
  PureState(ComplexVector amplitudes, FactorDims dims);
  explicit PureState(ComplexVector amplitudes);

  const ComplexVector& amplitudes() const { return amplitudes_; }
  const FactorDims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  ComplexMatrix projector() const;

private:
  ComplexVector amplitudes_;
  FactorDims dims_;
};

// Positive unit-trace operator with its factor dims.
class DensityOperator {
public:
  DensityOperator(ComplexMatrix matrix, FactorDims dims);
  explicit DensityOperator(ComplexMatrix matrix);
  static DensityOperator from(const PureState& psi);

  const ComplexMatrix& matrix() const { return matrix_; }
  const FactorDims& dims() const { return dims_; }
  std::size_t dim() const { return square_dim(matrix_); }

private:
  ComplexMatrix matrix_;
  FactorDims dims_;
};

// Haar-distributed unit vector in C^d; deterministic in the seed.
PureState sample_haar_state(std::size_t d, std::uint64_t seed);

}  // namespace qmult
