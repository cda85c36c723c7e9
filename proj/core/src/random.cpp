#include "qmult/random.hpp"

#include <cmath>
#include <stdexcept>

namespace qmult {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

ComplexVector haar_vector(std::size_t d, Rng& rng) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  ComplexVector v = ginibre(d, 1, rng).col(0);
  double norm = v.norm();
  while (norm == 0.0) {
    v = ginibre(d, 1, rng).col(0);
    norm = v.norm();
  }
  return v / norm;
}

ComplexMatrix random_hermitian(std::size_t d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  return (g + g.adjoint()) * 0.5;
}

ComplexMatrix random_density(std::size_t d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho = hermitian_part(rho);
  return rho / rho.trace().real();
}

ComplexMatrix haar_isometry(std::size_t d_out, std::size_t d_in, Rng& rng) {
  if (d_out < d_in) throw std::invalid_argument("isometry needs d_out >= d_in");
  const ComplexMatrix g = ginibre(d_out, d_in, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d_out, d_in);
  // Fix the phases with diag(R) so the distribution is Haar.
  const ComplexMatrix r = qr.matrixQR().topLeftCorner(d_in, d_in);
  for (std::size_t j = 0; j < d_in; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
  return q;
}

}  // namespace qmult
